#include "covaug/maps.hpp"

#include "covaug/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace covaug {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Sums of the periodic parts of y, y', y'' at t.  Each mode's phase is
/// reduced to [0, 1) before the trig calls, so the periodic parts vanish
/// identically whenever k*t is an integer -- in particular at t = 0 and
/// t = 1, which pins the endpoints exactly.
struct SeriesSums {
  double y = 0.0;    // sum_k (c_k sin + d_k (1 - cos)) / (2 pi k)
  double dy = 0.0;   // sum_k (c_k cos + d_k sin)
  double d2y = 0.0;  // sum_k 2 pi k (-c_k sin + d_k cos)
};

SeriesSums series_sums(const TrigDensityParams& p, double t) {
  SeriesSums s;
  for (int k = 1; k <= p.modes(); ++k) {
    const double ck = p.cos_coeffs[k - 1];
    const double dk = p.sin_coeffs[k - 1];
    const double kt = k * t;
    const double phase = kTwoPi * (kt - std::floor(kt));
    const double sn = std::sin(phase);
    const double cs = std::cos(phase);
    s.y += (ck * sn + dk * (1.0 - cs)) / (kTwoPi * k);
    s.dy += ck * cs + dk * sn;
    s.d2y += kTwoPi * k * (dk * cs - ck * sn);
  }
  return s;
}

void check_coefficients(const TrigDensityParams& p) {
  if (p.cos_coeffs.size() != p.sin_coeffs.size())
    throw std::invalid_argument("trig density: cos/sin coefficient counts differ");
  if (!(p.beta > 0.0)) throw std::invalid_argument("trig density: beta must be positive");
  if (!(p.normalization > 0.0) || !std::isfinite(p.normalization))
    throw std::invalid_argument("trig density: normalization must be positive and finite");
}

double min_density_on_probe_grid(const TrigDensityParams& p) {
  constexpr int kProbePoints = 2048;
  double lo = 1.0;
  for (int j = 0; j < kProbePoints; ++j) {
    const double t = static_cast<double>(j) / (kProbePoints - 1);
    lo = std::min(lo, 1.0 + series_sums(p, t).dy / p.normalization);
  }
  return lo;
}

}  // namespace

TrigDensityParams trig_density(Eigen::VectorXd cos_coeffs, Eigen::VectorXd sin_coeffs,
                               double beta) {
  TrigDensityParams p{std::move(cos_coeffs), std::move(sin_coeffs), beta, 1.0};
  p.normalization = p.safe_normalization();
  check_coefficients(p);
  return p;
}

TrigDensityParams trig_density_fixed(Eigen::VectorXd cos_coeffs, Eigen::VectorXd sin_coeffs,
                                     double beta, double normalization) {
  TrigDensityParams p{std::move(cos_coeffs), std::move(sin_coeffs), beta, normalization};
  check_coefficients(p);
  return p;
}

TrigDensityParams trig_density_from_phases(const Eigen::VectorXd& amplitudes,
                                           const Eigen::VectorXd& phases, double beta) {
  if (amplitudes.size() != phases.size())
    throw std::invalid_argument("trig density: amplitude/phase counts differ");
  // a_k cos(2 pi k t + p_k) = a_k cos(p_k) cos(2 pi k t) - a_k sin(p_k) sin(2 pi k t)
  Eigen::VectorXd cos_coeffs = amplitudes.array() * phases.array().cos();
  Eigen::VectorXd sin_coeffs = -(amplitudes.array() * phases.array().sin());
  return trig_density(std::move(cos_coeffs), std::move(sin_coeffs), beta);
}

Map1D::Map1D() : params_{Eigen::VectorXd(0), Eigen::VectorXd(0), 1.0, 1.0} {}

Map1D::Map1D(TrigDensityParams params) : params_(std::move(params)) {
  check_coefficients(params_);
  // A safe normalization guarantees positivity; smaller ones are probed.
  if (params_.normalization < params_.safe_normalization() &&
      min_density_on_probe_grid(params_) <= 0.0)
    throw std::domain_error("Map1D: density is not strictly positive (map not monotone)");
}

double Map1D::operator()(double t) const {
  return t + series_sums(params_, t).y / params_.normalization;
}

double Map1D::deriv(double t) const {
  return 1.0 + series_sums(params_, t).dy / params_.normalization;
}

double Map1D::deriv2(double t) const {
  return series_sums(params_, t).d2y / params_.normalization;
}

MapJet1D Map1D::jet(double t) const {
  const SeriesSums s = series_sums(params_, t);
  const double c0 = params_.normalization;
  return {t + s.y / c0, 1.0 + s.dy / c0, s.d2y / c0};
}

Map1D sample_map_1d(std::uint64_t seed, int modes, double beta) {
  if (modes < 0) throw std::invalid_argument("sample_map_1d: modes must be >= 0");
  RandomStream rs(seed);
  Eigen::VectorXd amplitudes(modes), phases(modes);
  for (int k = 0; k < modes; ++k) amplitudes[k] = rs.normal();
  for (int k = 0; k < modes; ++k) phases[k] = rs.normal();
  return Map1D(trig_density_from_phases(amplitudes, phases, beta));
}

Map2D::Map2D() : edges_{} {}

Map2D::Map2D(Map1D bottom, Map1D top, Map1D left, Map1D right)
    : edges_{std::move(bottom), std::move(top), std::move(left), std::move(right)} {}

Eigen::Vector2d Map2D::operator()(const Eigen::Vector2d& xi) const {
  const double u = xi[0], v = xi[1];
  return {edges_[0](u) * (1.0 - v) + edges_[1](u) * v,
          edges_[2](v) * (1.0 - u) + edges_[3](v) * u};
}

bool Map2D::is_identity() const {
  for (const Map1D& e : edges_)
    if (!e.is_identity()) return false;
  return true;
}

Map2D sample_map_2d(std::uint64_t seed, int modes, double beta, double normalization) {
  if (modes < 0) throw std::invalid_argument("sample_map_2d: modes must be >= 0");
  std::array<Map1D, 4> edges;
  for (int e = 0; e < 4; ++e) {
    RandomStream rs(derive_seed(seed, static_cast<std::uint64_t>(e)));
    Eigen::VectorXd cos_coeffs(modes), sin_coeffs(modes);
    for (int k = 0; k < modes; ++k) cos_coeffs[k] = rs.normal();
    for (int k = 0; k < modes; ++k) sin_coeffs[k] = rs.normal();
    TrigDensityParams p =
        trig_density_fixed(std::move(cos_coeffs), std::move(sin_coeffs), beta, normalization);
    // Fall back to the safe normalization when the requested one does not
    // keep the density positive.
    if (min_density_on_probe_grid(p) <= 0.0) p.normalization = p.safe_normalization();
    edges[e] = Map1D(std::move(p));
  }
  return Map2D(std::move(edges[0]), std::move(edges[1]), std::move(edges[2]),
               std::move(edges[3]));
}

namespace {

/// Fill det, inv_jac, d2xi, det_grad from xi, x, jac, d2x.
template <int Dim>
void complete_jet(JacobiJet<Dim>& jet) {
  jet.det = jet.jac.determinant();
  if (std::abs(jet.det) < kSingularDeterminant)
    throw std::domain_error("jacobi_jet: singular jacobian");
  jet.inv_jac = jet.jac.inverse();
  // d2xi[a](i,j) = -inv(g,i) inv(t,j) inv(a,k) d2x[k](g,t)
  for (int a = 0; a < Dim; ++a)
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) {
        double sum = 0.0;
        for (int g = 0; g < Dim; ++g)
          for (int t = 0; t < Dim; ++t)
            for (int k = 0; k < Dim; ++k)
              sum += jet.inv_jac(g, i) * jet.inv_jac(t, j) * jet.inv_jac(a, k) *
                     jet.d2x[k](g, t);
        jet.d2xi[a](i, j) = -sum;
      }
  // det_grad(k) = det * inv(m,i) * d2x[i](m,k)
  for (int k = 0; k < Dim; ++k) {
    double sum = 0.0;
    for (int m = 0; m < Dim; ++m)
      for (int i = 0; i < Dim; ++i) sum += jet.inv_jac(m, i) * jet.d2x[i](m, k);
    jet.det_grad[k] = jet.det * sum;
  }
}

}  // namespace

JacobiJet<1> jacobi_jet(const Map1D& map, double xi) {
  const MapJet1D j = map.jet(xi);
  JacobiJet<1> jet;
  jet.xi[0] = xi;
  jet.x[0] = j.x;
  jet.jac(0, 0) = j.dx;
  jet.d2x[0](0, 0) = j.d2x;
  complete_jet(jet);
  return jet;
}

JacobiJet<2> jacobi_jet(const Map2D& map, const Eigen::Vector2d& xi) {
  const double u = xi[0], v = xi[1];
  const MapJet1D b = map.bottom().jet(u);
  const MapJet1D t = map.top().jet(u);
  const MapJet1D l = map.left().jet(v);
  const MapJet1D r = map.right().jet(v);

  JacobiJet<2> jet;
  jet.xi = xi;
  jet.x[0] = b.x * (1.0 - v) + t.x * v;
  jet.x[1] = l.x * (1.0 - u) + r.x * u;

  jet.jac(0, 0) = b.dx * (1.0 - v) + t.dx * v;
  jet.jac(0, 1) = t.x - b.x;
  jet.jac(1, 0) = r.x - l.x;
  jet.jac(1, 1) = l.dx * (1.0 - u) + r.dx * u;

  // x1 is linear in v and x2 linear in u, so d2x1/dv2 = d2x2/du2 = 0.
  jet.d2x[0](0, 0) = b.d2x * (1.0 - v) + t.d2x * v;
  jet.d2x[0](0, 1) = jet.d2x[0](1, 0) = t.dx - b.dx;
  jet.d2x[0](1, 1) = 0.0;
  jet.d2x[1](0, 0) = 0.0;
  jet.d2x[1](0, 1) = jet.d2x[1](1, 0) = r.dx - l.dx;
  jet.d2x[1](1, 1) = l.d2x * (1.0 - u) + r.d2x * u;

  complete_jet(jet);
  return jet;
}

double CalculusReport::max_error() const {
  return std::max({max_inverse_error, max_det_grad_error, max_d2xi_error,
                   max_divergence_error});
}

CalculusReport check_calculus_identities(const Map2D& map, const Eigen::Matrix2Xd& points,
                                         double fd_step) {
  const double h = fd_step;
  CalculusReport report;
  const auto rel = [](double err, double ref) { return err / std::max(1.0, std::abs(ref)); };

  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    const Eigen::Vector2d p = points.col(c);
    const JacobiJet<2> jet = jacobi_jet(map, p);
    // Displaced jets, shared by all finite-difference checks below.
    std::array<JacobiJet<2>, 2> plus, minus;
    for (int k = 0; k < 2; ++k) {
      plus[k] = jacobi_jet(map, p + h * Eigen::Vector2d::Unit(k));
      minus[k] = jacobi_jet(map, p - h * Eigen::Vector2d::Unit(k));
    }

    const Eigen::Matrix2d residual =
        jet.jac * jet.inv_jac - Eigen::Matrix2d::Identity();
    report.max_inverse_error =
        std::max(report.max_inverse_error, residual.cwiseAbs().maxCoeff());

    for (int k = 0; k < 2; ++k) {
      const double fd = (plus[k].det - minus[k].det) / (2.0 * h);
      report.max_det_grad_error =
          std::max(report.max_det_grad_error, rel(std::abs(jet.det_grad[k] - fd), fd));
    }

    // d/dxi^b [inv_jac(a,i)] = sum_j d2xi[a](i,j) jac(j,b)
    for (int a = 0; a < 2; ++a)
      for (int i = 0; i < 2; ++i)
        for (int b = 0; b < 2; ++b) {
          const double fd = (plus[b].inv_jac(a, i) - minus[b].inv_jac(a, i)) / (2.0 * h);
          double predicted = 0.0;
          for (int j = 0; j < 2; ++j) predicted += jet.d2xi[a](i, j) * jet.jac(j, b);
          report.max_d2xi_error =
              std::max(report.max_d2xi_error, rel(std::abs(predicted - fd), fd));
        }

    // (1/J) d/dxi^j ( J inv_jac(j,i) ) = 0
    for (int i = 0; i < 2; ++i) {
      double divergence = 0.0;
      for (int j = 0; j < 2; ++j)
        divergence += (plus[j].det * plus[j].inv_jac(j, i) -
                       minus[j].det * minus[j].inv_jac(j, i)) /
                      (2.0 * h);
      report.max_divergence_error =
          std::max(report.max_divergence_error, rel(std::abs(divergence), jet.det));
    }
  }
  return report;
}

double grid_distortion(const Map1D& map, int n) {
  if (n < 2) throw std::invalid_argument("grid_distortion: need n >= 2");
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / (n - 1);
    worst = std::max(worst, std::abs(map(t) - t));
  }
  return worst;
}

double grid_distortion(const Map2D& map, int n) {
  if (n < 2) throw std::invalid_argument("grid_distortion: need n >= 2");
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d xi(static_cast<double>(i) / (n - 1),
                               static_cast<double>(j) / (n - 1));
      worst = std::max(worst, (map(xi) - xi).cwiseAbs().maxCoeff());
    }
  return worst;
}

}  // namespace covaug
