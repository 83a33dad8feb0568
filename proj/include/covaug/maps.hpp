#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>

namespace covaug {

/// Determinants below this threshold are treated as singular.
inline constexpr double kSingularDeterminant = 1e-14;

/// Trigonometric probability density on [0, 1]:
///
///   p(t) = 1 + sum_k ( c_k cos(2 pi k t) + d_k sin(2 pi k t) ) / c0
///
/// p integrates to 1 over [0, 1] for any normalization c0, and is strictly
/// positive whenever c0 >= sum_k(|c_k| + |d_k|) + beta with beta > 0.
struct TrigDensityParams {
  Eigen::VectorXd cos_coeffs;  ///< c_1 .. c_N
  Eigen::VectorXd sin_coeffs;  ///< d_1 .. d_N
  double beta = 1.0;           ///< positivity margin
  double normalization = 1.0;  ///< c0

  int modes() const { return static_cast<int>(cos_coeffs.size()); }

  /// Smallest normalization that guarantees p > 0 everywhere.
  double safe_normalization() const {
    return cos_coeffs.cwiseAbs().sum() + sin_coeffs.cwiseAbs().sum() + beta;
  }
};

/// Density with the positivity-safe normalization c0 = sum(|c|+|d|) + beta.
TrigDensityParams trig_density(Eigen::VectorXd cos_coeffs, Eigen::VectorXd sin_coeffs,
                               double beta);

/// Density with a caller-chosen fixed normalization (positivity is probed
/// at construction of Map1D, not here).
TrigDensityParams trig_density_fixed(Eigen::VectorXd cos_coeffs, Eigen::VectorXd sin_coeffs,
                                     double beta, double normalization);

/// Amplitude/phase form  sum_k a_k cos(2 pi k t + p_k)  converted to the
/// cos/sin parametrization via the angle-addition identity, with the
/// positivity-safe normalization.
TrigDensityParams trig_density_from_phases(const Eigen::VectorXd& amplitudes,
                                           const Eigen::VectorXd& phases, double beta);

/// Value and first two derivatives of a Map1D at one point.
struct MapJet1D {
  double x = 0.0;
  double dx = 1.0;
  double d2x = 0.0;
};

/// Smooth monotone map of [0, 1] onto itself: the CDF of a TrigDensityParams,
///
///   y(t)  = t + sum_k ( c_k sin(2 pi k t) + d_k (1 - cos(2 pi k t)) )
///                 / (2 pi k c0),
///   y'(t) = p(t),   y''(t) = p'(t).
///
/// Endpoints are pinned exactly (y(0) = 0, y(1) = 1): every periodic term is
/// evaluated with its phase reduced to [0, 1), so it vanishes identically at
/// integer k*t.  Construction rejects densities that are not strictly
/// positive (probed on a 2048-point grid when the normalization is smaller
/// than the safe one).
class Map1D {
 public:
  Map1D();  ///< identity map (zero modes)
  explicit Map1D(TrigDensityParams params);

  double operator()(double t) const;
  double deriv(double t) const;
  double deriv2(double t) const;
  MapJet1D jet(double t) const;

  bool is_identity() const { return params_.modes() == 0; }
  const TrigDensityParams& params() const { return params_; }

 private:
  TrigDensityParams params_;
};

/// Random Map1D: amplitudes and phases standard normal (amplitudes first,
/// then phases), safe normalization.
Map1D sample_map_1d(std::uint64_t seed, int modes = 5, double beta = 1.0);

/// Smooth map of [0, 1]^2 onto itself built from four 1D edge maps by
/// transfinite interpolation:
///
///   x1(u, v) = bottom(u) (1 - v) + top(u) v
///   x2(u, v) = left(v) (1 - u) + right(v) u
///
/// The boundary is mapped onto itself edge-by-edge and the four corners are
/// fixed points.
class Map2D {
 public:
  Map2D();  ///< identity map
  Map2D(Map1D bottom, Map1D top, Map1D left, Map1D right);

  Eigen::Vector2d operator()(const Eigen::Vector2d& xi) const;

  const Map1D& bottom() const { return edges_[0]; }
  const Map1D& top() const { return edges_[1]; }
  const Map1D& left() const { return edges_[2]; }
  const Map1D& right() const { return edges_[3]; }
  bool is_identity() const;

 private:
  std::array<Map1D, 4> edges_;
};

/// Random Map2D: four independent edge maps (sub-seeds bottom, top, left,
/// right), cos/sin coefficients standard normal (cos first), fixed
/// normalization; if the fixed normalization leaves the density
/// non-positive on the probe grid, that edge falls back to the safe
/// normalization.
Map2D sample_map_2d(std::uint64_t seed, int modes = 6, double beta = 1e-5,
                    double normalization = 1.0);

/// First- and second-order differential data of a coordinate map at one
/// point.  Index convention: jac(i, a) = dx^i/dxi^a, inv_jac(a, i) =
/// dxi^a/dx^i, d2x[r](a, b) = d^2 x^r / dxi^a dxi^b, d2xi[a](i, j) =
/// d^2 xi^a / dx^i dx^j, det_grad(k) = d(det)/dxi^k.
template <int Dim>
struct JacobiJet {
  static_assert(Dim == 1 || Dim == 2, "only 1D and 2D maps are supported");
  using Vec = Eigen::Matrix<double, Dim, 1>;
  using Mat = Eigen::Matrix<double, Dim, Dim>;

  Vec xi = Vec::Zero();
  Vec x = Vec::Zero();
  Mat jac = Mat::Identity();
  double det = 1.0;
  Mat inv_jac = Mat::Identity();
  std::array<Mat, Dim> d2x{};
  std::array<Mat, Dim> d2xi{};
  Vec det_grad = Vec::Zero();
};

/// Full differential data at one point; throws std::domain_error when
/// |det| < kSingularDeterminant.
JacobiJet<1> jacobi_jet(const Map1D& map, double xi);
JacobiJet<2> jacobi_jet(const Map2D& map, const Eigen::Vector2d& xi);

/// Worst observed violations of the analytic Jacobian calculus against
/// central finite differences.  Errors are relative with a unit floor:
/// |analytic - reference| / max(1, |reference|).
struct CalculusReport {
  double max_inverse_error = 0.0;     ///< ||jac * inv_jac - I||_max
  double max_det_grad_error = 0.0;    ///< det_grad vs differenced det
  double max_d2xi_error = 0.0;        ///< d2xi vs differenced inv_jac
  double max_divergence_error = 0.0;  ///< (1/J) d_j (J inv_jac(j,i)), differenced

  double max_error() const;
  bool within(double tol) const { return max_error() <= tol; }
};

/// Check the analytic jet of `map` against finite differences at the given
/// points (one column per point).
CalculusReport check_calculus_identities(const Map2D& map, const Eigen::Matrix2Xd& points,
                                         double fd_step = 1e-5);

/// Max over an n-point (1D) / n x n (2D) uniform grid of ||x(xi) - xi||_inf.
double grid_distortion(const Map1D& map, int n);
double grid_distortion(const Map2D& map, int n);

}  // namespace covaug
