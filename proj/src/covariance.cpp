#include "covaug/covariance.hpp"

#include "covaug/interp.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

namespace covaug {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

double node(int j, int n) { return static_cast<double>(j) / static_cast<double>(n - 1); }

MapJet1D checked_jet(const Map1D& map, double xi) {
  const MapJet1D jet = map.jet(xi);
  if (!(jet.dx > kSingularDeterminant))
    throw std::domain_error("transform: map derivative is not positive");
  return jet;
}

/// Jets for every node of the n x n grid, flattened x-major (index i*n + j).
std::vector<JacobiJet<2>> grid_jets(const Map2D& map, int n) {
  std::vector<JacobiJet<2>> jets;
  jets.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      jets.push_back(jacobi_jet(map, Eigen::Vector2d(node(i, n), node(j, n))));
      if (!(jets.back().det > 0.0))
        throw std::domain_error("transform: map folds over (non-positive Jacobian)");
    }
  return jets;
}

// ---- gridded channels -> callables (cubic Hermite resampling) ----

ScalarField1D hermite(Eigen::VectorXd values) {
  auto interp = std::make_shared<const CubicHermite1D>(std::move(values));
  return [interp](double x) { return (*interp)(x); };
}

ScalarField2D hermite(Eigen::MatrixXd values) {
  auto interp = std::make_shared<const CubicHermite2D>(std::move(values));
  return [interp](double x, double y) { return (*interp)(x, y); };
}

MatrixField2D hermite_tensor(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a12,
                             const Eigen::MatrixXd& a22) {
  return [h11 = hermite(a11), h12 = hermite(a12), h22 = hermite(a22)](double x, double y) {
    Eigen::Matrix2d a;
    const double off = h12(x, y);
    a << h11(x, y), off, off, h22(x, y);
    return a;
  };
}

VectorField2D hermite_vector(const Eigen::MatrixXd& v1, const Eigen::MatrixXd& v2) {
  return [h1 = hermite(v1), h2 = hermite(v2)](double x, double y) {
    return Eigen::Vector2d(h1(x, y), h2(x, y));
  };
}

/// Time level m of a flattened 2D trajectory as an n x n matrix.
Eigen::MatrixXd unflatten(const SpaceTimeField& field, Eigen::Index m) {
  const int n = field.grid.n;
  return Eigen::Map<const RowMatrixXd>(field.values.row(m).data(), n, n);
}

std::vector<ScalarField1D> hermite_rows(const SpaceTimeField& field) {
  std::vector<ScalarField1D> slices;
  slices.reserve(static_cast<std::size_t>(field.values.rows()));
  for (Eigen::Index m = 0; m < field.values.rows(); ++m)
    slices.push_back(hermite(Eigen::VectorXd(field.values.row(m).transpose())));
  return slices;
}

std::vector<ScalarField2D> hermite_slices(const SpaceTimeField& field) {
  std::vector<ScalarField2D> slices;
  slices.reserve(static_cast<std::size_t>(field.values.rows()));
  for (Eigen::Index m = 0; m < field.values.rows(); ++m)
    slices.push_back(hermite(unflatten(field, m)));
  return slices;
}

void check_trajectory(const SpaceTimeField& field, int dim, Eigen::Index n,
                      const char* message) {
  const Eigen::Index points = dim == 1 ? n : n * n;
  require(field.grid.dim == dim && field.grid.n == n && field.time.nt >= 1 &&
              field.values.rows() == field.time.nt && field.values.cols() == points,
          message);
}

}  // namespace

// ---- 1D ----

EllipticFields1D transform_elliptic_1d(const ScalarField1D& a, const ScalarField1D& u,
                                       const ScalarField1D& f, const Map1D& map, int n) {
  require(n >= 2, "transform_elliptic_1d: need at least two grid points");
  EllipticFields1D out;
  out.a.resize(n);
  out.u.resize(n);
  out.f.resize(n);
  for (int j = 0; j < n; ++j) {
    const MapJet1D jet = checked_jet(map, node(j, n));
    out.a(j) = a(jet.x) / jet.dx;  // J * (1/J) a (1/J)
    out.u(j) = u(jet.x);
    out.f(j) = jet.dx * f(jet.x);
  }
  return out;
}

EllipticFields1D transform_elliptic_1d(const EllipticFields1D& fields, const Map1D& map) {
  const Eigen::Index n = fields.a.size();
  require(n >= 2 && fields.u.size() == n && fields.f.size() == n,
          "transform_elliptic_1d: channel sizes disagree");
  return transform_elliptic_1d(hermite(fields.a), hermite(fields.u), hermite(fields.f), map,
                               static_cast<int>(n));
}

ConvDiffFields1D transform_convdiff_1d(const ScalarField1D& a, const ScalarField1D& v,
                                       const std::vector<ScalarField1D>& phi_slices,
                                       const Map1D& map, int n, double t_final) {
  require(n >= 2, "transform_convdiff_1d: need at least two grid points");
  require(!phi_slices.empty(), "transform_convdiff_1d: need at least one time slice");
  const int nt = static_cast<int>(phi_slices.size());
  ConvDiffFields1D out;
  out.a.resize(n);
  out.v.resize(n);
  out.phi.values.resize(nt, n);
  out.phi.grid = Grid{1, n};
  out.phi.time = TimeGrid{nt, t_final};
  for (int j = 0; j < n; ++j) {
    const MapJet1D jet = checked_jet(map, node(j, n));
    const double a_new = a(jet.x) / (jet.dx * jet.dx);
    out.a(j) = a_new;
    out.v(j) = v(jet.x) / jet.dx + a_new * jet.d2x / jet.dx;
    for (int m = 0; m < nt; ++m) out.phi.values(m, j) = jet.dx * phi_slices[m](jet.x);
  }
  return out;
}

ConvDiffFields1D transform_convdiff_1d(const ConvDiffFields1D& fields, const Map1D& map) {
  const Eigen::Index n = fields.a.size();
  require(n >= 2 && fields.v.size() == n, "transform_convdiff_1d: channel sizes disagree");
  check_trajectory(fields.phi, 1, n, "transform_convdiff_1d: trajectory shape disagrees");
  return transform_convdiff_1d(hermite(fields.a), hermite(fields.v), hermite_rows(fields.phi),
                               map, static_cast<int>(n), fields.phi.time.t_final);
}

WaveFields1D transform_wave_1d(const ScalarField1D& c, const ScalarField1D& v,
                               const ScalarField1D& e,
                               const std::vector<ScalarField1D>& rho_slices, const Map1D& map,
                               int n, double t_final) {
  require(n >= 2, "transform_wave_1d: need at least two grid points");
  require(!rho_slices.empty(), "transform_wave_1d: need at least one time slice");
  const int nt = static_cast<int>(rho_slices.size());
  WaveFields1D out;
  out.c.resize(n);
  out.v.resize(n);
  out.e.resize(n);
  out.rho.values.resize(nt, n);
  out.rho.grid = Grid{1, n};
  out.rho.time = TimeGrid{nt, t_final};
  for (int j = 0; j < n; ++j) {
    const MapJet1D jet = checked_jet(map, node(j, n));
    const double dx2 = jet.dx * jet.dx;
    out.c(j) = c(jet.x) / dx2;
    // v/x' - c * d2xi, with d2xi = -x''/(x')^3 in one dimension
    out.v(j) = v(jet.x) / jet.dx + c(jet.x) * jet.d2x / (dx2 * jet.dx);
    out.e(j) = e(jet.x);
    for (int m = 0; m < nt; ++m) out.rho.values(m, j) = rho_slices[m](jet.x);
  }
  return out;
}

WaveFields1D transform_wave_1d(const WaveFields1D& fields, const Map1D& map) {
  const Eigen::Index n = fields.c.size();
  require(n >= 2 && fields.v.size() == n && fields.e.size() == n,
          "transform_wave_1d: channel sizes disagree");
  check_trajectory(fields.rho, 1, n, "transform_wave_1d: trajectory shape disagrees");
  return transform_wave_1d(hermite(fields.c), hermite(fields.v), hermite(fields.e),
                           hermite_rows(fields.rho), map, static_cast<int>(n),
                           fields.rho.time.t_final);
}

// ---- 2D ----

EllipticFields2D transform_elliptic_2d(const MatrixField2D& a, const ScalarField2D& u,
                                       const ScalarField2D& f, const Map2D& map, int n) {
  require(n >= 2, "transform_elliptic_2d: need at least two grid points");
  EllipticFields2D out;
  out.a11.resize(n, n);
  out.a12.resize(n, n);
  out.a22.resize(n, n);
  out.u.resize(n, n);
  out.f.resize(n, n);
  const std::vector<JacobiJet<2>> jets = grid_jets(map, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const JacobiJet<2>& jet = jets[static_cast<std::size_t>(i) * n + j];
      const Eigen::Matrix2d a_new =
          jet.det * jet.inv_jac * a(jet.x(0), jet.x(1)) * jet.inv_jac.transpose();
      out.a11(i, j) = a_new(0, 0);
      out.a12(i, j) = 0.5 * (a_new(0, 1) + a_new(1, 0));
      out.a22(i, j) = a_new(1, 1);
      out.u(i, j) = u(jet.x(0), jet.x(1));
      out.f(i, j) = jet.det * f(jet.x(0), jet.x(1));
    }
  return out;
}

EllipticFields2D transform_elliptic_2d(const EllipticFields2D& fields, const Map2D& map) {
  const Eigen::Index n = fields.a11.rows();
  const auto square = [n](const Eigen::MatrixXd& m) { return m.rows() == n && m.cols() == n; };
  require(n >= 2 && square(fields.a11) && square(fields.a12) && square(fields.a22) &&
              square(fields.u) && square(fields.f),
          "transform_elliptic_2d: channel shapes disagree");
  return transform_elliptic_2d(hermite_tensor(fields.a11, fields.a12, fields.a22),
                               hermite(fields.u), hermite(fields.f), map, static_cast<int>(n));
}

ConvDiffFields2D transform_convdiff_2d(const MatrixField2D& a, const VectorField2D& v,
                                       const std::vector<ScalarField2D>& phi_slices,
                                       const Map2D& map, int n, double t_final) {
  require(n >= 2, "transform_convdiff_2d: need at least two grid points");
  require(!phi_slices.empty(), "transform_convdiff_2d: need at least one time slice");
  const int nt = static_cast<int>(phi_slices.size());
  ConvDiffFields2D out;
  out.a11.resize(n, n);
  out.a12.resize(n, n);
  out.a22.resize(n, n);
  out.v1.resize(n, n);
  out.v2.resize(n, n);
  out.phi.values.resize(nt, static_cast<Eigen::Index>(n) * n);
  out.phi.grid = Grid{2, n};
  out.phi.time = TimeGrid{nt, t_final};
  const std::vector<JacobiJet<2>> jets = grid_jets(map, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * n + j;
      const JacobiJet<2>& jet = jets[p];
      const Eigen::Matrix2d a_new =
          jet.inv_jac * a(jet.x(0), jet.x(1)) * jet.inv_jac.transpose();
      const Eigen::Vector2d v_new =
          jet.inv_jac * v(jet.x(0), jet.x(1)) + a_new * jet.det_grad / jet.det;
      out.a11(i, j) = a_new(0, 0);
      out.a12(i, j) = 0.5 * (a_new(0, 1) + a_new(1, 0));
      out.a22(i, j) = a_new(1, 1);
      out.v1(i, j) = v_new(0);
      out.v2(i, j) = v_new(1);
      for (int m = 0; m < nt; ++m)
        out.phi.values(m, static_cast<Eigen::Index>(p)) =
            jet.det * phi_slices[m](jet.x(0), jet.x(1));
    }
  return out;
}

ConvDiffFields2D transform_convdiff_2d(const ConvDiffFields2D& fields, const Map2D& map) {
  const Eigen::Index n = fields.a11.rows();
  const auto square = [n](const Eigen::MatrixXd& m) { return m.rows() == n && m.cols() == n; };
  require(n >= 2 && square(fields.a11) && square(fields.a12) && square(fields.a22) &&
              square(fields.v1) && square(fields.v2),
          "transform_convdiff_2d: channel shapes disagree");
  check_trajectory(fields.phi, 2, n, "transform_convdiff_2d: trajectory shape disagrees");
  return transform_convdiff_2d(hermite_tensor(fields.a11, fields.a12, fields.a22),
                               hermite_vector(fields.v1, fields.v2),
                               hermite_slices(fields.phi), map, static_cast<int>(n),
                               fields.phi.time.t_final);
}

WaveFields2D transform_wave_2d(const MatrixField2D& c, const VectorField2D& v,
                               const std::vector<ScalarField2D>& rho_slices, const Map2D& map,
                               int n, double t_final) {
  require(n >= 2, "transform_wave_2d: need at least two grid points");
  require(!rho_slices.empty(), "transform_wave_2d: need at least one time slice");
  const int nt = static_cast<int>(rho_slices.size());
  WaveFields2D out;
  out.c11.resize(n, n);
  out.c12.resize(n, n);
  out.c22.resize(n, n);
  out.v1.resize(n, n);
  out.v2.resize(n, n);
  out.rho.values.resize(nt, static_cast<Eigen::Index>(n) * n);
  out.rho.grid = Grid{2, n};
  out.rho.time = TimeGrid{nt, t_final};
  const std::vector<JacobiJet<2>> jets = grid_jets(map, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const std::size_t p = static_cast<std::size_t>(i) * n + j;
      const JacobiJet<2>& jet = jets[p];
      const Eigen::Matrix2d c_old = c(jet.x(0), jet.x(1));
      const Eigen::Matrix2d c_new = jet.inv_jac * c_old * jet.inv_jac.transpose();
      // v^i dxi/dx - c^{kj} d2xi(k, j)
      Eigen::Vector2d v_new = jet.inv_jac * v(jet.x(0), jet.x(1));
      v_new(0) -= (c_old.array() * jet.d2xi[0].array()).sum();
      v_new(1) -= (c_old.array() * jet.d2xi[1].array()).sum();
      out.c11(i, j) = c_new(0, 0);
      out.c12(i, j) = 0.5 * (c_new(0, 1) + c_new(1, 0));
      out.c22(i, j) = c_new(1, 1);
      out.v1(i, j) = v_new(0);
      out.v2(i, j) = v_new(1);
      for (int m = 0; m < nt; ++m)
        out.rho.values(m, static_cast<Eigen::Index>(p)) = rho_slices[m](jet.x(0), jet.x(1));
    }
  return out;
}

WaveFields2D transform_wave_2d(const WaveFields2D& fields, const Map2D& map) {
  const Eigen::Index n = fields.c11.rows();
  const auto square = [n](const Eigen::MatrixXd& m) { return m.rows() == n && m.cols() == n; };
  require(n >= 2 && square(fields.c11) && square(fields.c12) && square(fields.c22) &&
              square(fields.v1) && square(fields.v2),
          "transform_wave_2d: channel shapes disagree");
  check_trajectory(fields.rho, 2, n, "transform_wave_2d: trajectory shape disagrees");
  return transform_wave_2d(hermite_tensor(fields.c11, fields.c12, fields.c22),
                           hermite_vector(fields.v1, fields.v2), hermite_slices(fields.rho),
                           map, static_cast<int>(n), fields.rho.time.t_final);
}

}  // namespace covaug
