#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace covaug {

/// Row-major dense matrix: row m of a trajectory is one contiguous time slice.
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Coefficient fields are supplied as callables so both closed-form fields
/// and gridded interpolants can drive the solvers.
using ScalarField1D = std::function<double(double)>;
using ScalarField2D = std::function<double(double, double)>;
using MatrixField2D = std::function<Eigen::Matrix2d(double, double)>;
using VectorField2D = std::function<Eigen::Vector2d(double, double)>;

/// Uniform node-centred grid on [0, 1]^dim with nodes j / (n - 1).
struct Grid {
  int dim = 1;
  int n = 2;

  double h() const { return 1.0 / (n - 1); }
  double node(int j) const { return static_cast<double>(j) / (n - 1); }
};

/// Uniform time levels 0 .. t_final inclusive.
struct TimeGrid {
  int nt = 2;
  double t_final = 1.0;

  double dt() const { return t_final / (nt - 1); }
  double node(int m) const { return t_final * m / (nt - 1); }
};

/// Full trajectory of a Dirichlet field: values(m, .) is time level m; 1D
/// slices hold n nodal values, 2D slices n*n values flattened as i * n + j
/// (x index major).  Boundary entries are zero at every level.
struct SpaceTimeField {
  RowMatrixXd values;
  Grid grid;
  TimeGrid time;
};

/// Discretization failure with a machine-readable reason.
struct SolverError : std::runtime_error {
  enum class Kind {
    bad_argument,
    non_positive_coefficient,
    cfl_violation,
    indefinite_system,
  };

  SolverError(Kind k, const std::string& message) : std::runtime_error(message), kind(k) {}

  Kind kind;
};

/// d/dx( a(x) du/dx ) = f(x) on (0, 1), u(0) = u(1) = 0.  Linear finite
/// elements with midpoint-evaluated diffusion and nodal load; nodally exact
/// for constant a and f.  Requires a > 0 at the midpoints.
Eigen::VectorXd solve_elliptic_1d(const ScalarField1D& a, const ScalarField1D& f, int n);

/// dphi/dt + d(v phi)/dx = d/dx( a dphi/dx ), phi(., 0) = phi0, Dirichlet.
/// Crank-Nicolson in time over a conservative central stencil,
/// dt = t_final / (nt - 1).
SpaceTimeField solve_convdiff_1d(const ScalarField1D& a, const ScalarField1D& v,
                                 const Eigen::VectorXd& phi0, int n, int nt,
                                 double t_final);

/// d2rho/dt2 + v drho/dx = c d2rho/dx2 + e rho, rho(., 0) = rho0, zero
/// initial velocity, Dirichlet.  Leapfrog with a Taylor first step; enforces
/// the CFL bound dt <= h / max sqrt(c).
SpaceTimeField solve_wave_1d(const ScalarField1D& c, const ScalarField1D& v,
                             const ScalarField1D& e, const Eigen::VectorXd& rho0, int n,
                             int nt, double t_final);

/// d_i( A^{ij}(x) d_j u ) = f on (0, 1)^2, u = 0 on the boundary.  Bilinear
/// finite elements, 2x2 Gauss quadrature, sparse Cholesky solve.  Requires
/// A symmetric positive definite at the quadrature points.  out(i, j) =
/// u(x_i, y_j).
Eigen::MatrixXd solve_elliptic_2d(const MatrixField2D& a, const ScalarField2D& f, int n);

/// dphi/dt + d_i(v^i phi) = d_i( A^{ij} d_j phi ) on (0, 1)^2, Dirichlet.
/// Bilinear finite elements (consistent mass) with Crank-Nicolson; the
/// implicit operator is factored once.  phi0(i, j) = phi(x_i, y_j, 0).
SpaceTimeField solve_convdiff_2d(const MatrixField2D& a, const VectorField2D& v,
                                 const Eigen::MatrixXd& phi0, int n, int nt,
                                 double t_final);

/// d2rho/dt2 + v^i d_i rho = C^{ij} d2_{ij} rho on (0, 1)^2, zero initial
/// velocity, Dirichlet.  Leapfrog over central stencils (four-point cross
/// for the mixed derivative); enforces dt <= h / sqrt(2 lambda_max(C)).
SpaceTimeField solve_wave_2d(const MatrixField2D& c, const VectorField2D& v,
                             const Eigen::MatrixXd& rho0, int n, int nt, double t_final);

}  // namespace covaug
