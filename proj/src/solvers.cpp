#include "covaug/solvers.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <array>
#include <cmath>
#include <vector>

namespace covaug {

namespace {

void require(bool ok, SolverError::Kind kind, const char* message) {
  if (!ok) throw SolverError(kind, message);
}

void check_space(int n) {
  require(n >= 3, SolverError::Kind::bad_argument, "grid needs at least 3 nodes");
}

void check_time(int nt, double t_final) {
  require(nt >= 2, SolverError::Kind::bad_argument, "time grid needs at least 2 levels");
  require(t_final > 0.0, SolverError::Kind::bad_argument, "final time must be positive");
}

/// Solves a tridiagonal system in place.  `lower` and `upper` have one entry
/// fewer than `diag`; lower(i) multiplies x(i) in row i+1.
Eigen::VectorXd solve_tridiagonal(const Eigen::VectorXd& lower, Eigen::VectorXd diag,
                                  const Eigen::VectorXd& upper, Eigen::VectorXd rhs) {
  const Eigen::Index m = diag.size();
  for (Eigen::Index i = 1; i < m; ++i) {
    require(diag(i - 1) != 0.0, SolverError::Kind::indefinite_system,
            "tridiagonal pivot vanished");
    const double w = lower(i - 1) / diag(i - 1);
    diag(i) -= w * upper(i - 1);
    rhs(i) -= w * rhs(i - 1);
  }
  require(diag(m - 1) != 0.0, SolverError::Kind::indefinite_system,
          "tridiagonal pivot vanished");
  Eigen::VectorXd x(m);
  x(m - 1) = rhs(m - 1) / diag(m - 1);
  for (Eigen::Index i = m - 2; i >= 0; --i) {
    x(i) = (rhs(i) - upper(i) * x(i + 1)) / diag(i);
  }
  return x;
}

/// Tridiagonal matvec with the same storage convention.
Eigen::VectorXd apply_tridiagonal(const Eigen::VectorXd& lower, const Eigen::VectorXd& diag,
                                  const Eigen::VectorXd& upper, const Eigen::VectorXd& x) {
  const Eigen::Index m = diag.size();
  Eigen::VectorXd y = diag.cwiseProduct(x);
  for (Eigen::Index i = 0; i + 1 < m; ++i) {
    y(i) += upper(i) * x(i + 1);
    y(i + 1) += lower(i) * x(i);
  }
  return y;
}

Eigen::VectorXd midpoint_values(const ScalarField1D& a, const Grid& grid) {
  Eigen::VectorXd mid(grid.n - 1);
  for (int i = 0; i + 1 < grid.n; ++i) {
    mid(i) = a(grid.node(i) + 0.5 * grid.h());
  }
  return mid;
}

Eigen::VectorXd nodal_values(const ScalarField1D& f, const Grid& grid) {
  Eigen::VectorXd vals(grid.n);
  for (int i = 0; i < grid.n; ++i) vals(i) = f(grid.node(i));
  return vals;
}

/// Interior tridiagonal of the conservative operator
///   L(phi)_i = [a_{i+1/2}(phi_{i+1}-phi_i) - a_{i-1/2}(phi_i-phi_{i-1})]/h^2
///            - (v_{i+1} phi_{i+1} - v_{i-1} phi_{i-1}) / (2h)
/// under homogeneous Dirichlet conditions.
struct Tridiag {
  Eigen::VectorXd lower, diag, upper;
};

Tridiag convdiff_operator(const Eigen::VectorXd& a_mid, const Eigen::VectorXd& v_node,
                          const Grid& grid) {
  const int m = grid.n - 2;
  const double h = grid.h();
  Tridiag op{Eigen::VectorXd(m - 1), Eigen::VectorXd(m), Eigen::VectorXd(m - 1)};
  for (int k = 0; k < m; ++k) {
    const int i = k + 1;
    op.diag(k) = -(a_mid(i - 1) + a_mid(i)) / (h * h);
    if (k + 1 < m) op.upper(k) = a_mid(i) / (h * h) - v_node(i + 1) / (2.0 * h);
    if (k > 0) op.lower(k - 1) = a_mid(i - 1) / (h * h) + v_node(i - 1) / (2.0 * h);
  }
  return op;
}

/// Shared leapfrog driver: rho^{m+1} = 2 rho^m - rho^{m-1} + dt^2 L(rho^m)
/// with the zero-velocity Taylor start rho^1 = rho^0 + dt^2/2 L(rho^0).
template <typename ApplyOp>
RowMatrixXd leapfrog(const Eigen::VectorXd& rho0, int nt, double dt, ApplyOp&& apply) {
  RowMatrixXd values(nt, rho0.size());
  values.row(0) = rho0.transpose();
  if (nt == 1) return values;
  Eigen::VectorXd prev = rho0;
  Eigen::VectorXd curr = rho0 + (0.5 * dt * dt) * apply(rho0);
  values.row(1) = curr.transpose();
  for (int m = 2; m < nt; ++m) {
    Eigen::VectorXd next = 2.0 * curr - prev + (dt * dt) * apply(curr);
    values.row(m) = next.transpose();
    prev = std::move(curr);
    curr = std::move(next);
  }
  return values;
}

constexpr double kGaussOffset = 0.28867513459481288225;  // 1 / (2 sqrt(3))

/// 2x2 Gauss points on the reference cell [0,1]^2, weight 1/4 each.
std::array<Eigen::Vector2d, 4> reference_gauss_points() {
  const double lo = 0.5 - kGaussOffset;
  const double hi = 0.5 + kGaussOffset;
  return {Eigen::Vector2d(lo, lo), Eigen::Vector2d(hi, lo), Eigen::Vector2d(lo, hi),
          Eigen::Vector2d(hi, hi)};
}

double shape_value(int local, double xi, double eta) {
  const double sx = (local & 1) ? xi : 1.0 - xi;
  const double sy = (local & 2) ? eta : 1.0 - eta;
  return sx * sy;
}

Eigen::Vector2d shape_gradient(int local, double xi, double eta, double h) {
  const double sx = (local & 1) ? xi : 1.0 - xi;
  const double sy = (local & 2) ? eta : 1.0 - eta;
  const double dx = (local & 1) ? 1.0 : -1.0;
  const double dy = (local & 2) ? 1.0 : -1.0;
  return Eigen::Vector2d(dx * sy / h, sx * dy / h);
}

/// Interior-node numbering for an n x n grid: dof(i, j) = (i-1)(n-2) + (j-1).
int interior_dof(int i, int j, int n) { return (i - 1) * (n - 2) + (j - 1); }

struct Fem2DSystem {
  Eigen::SparseMatrix<double> stiffness;  // includes the convection part if any
  Eigen::SparseMatrix<double> mass;
  Eigen::VectorXd load;
};

/// Assembles bilinear finite-element matrices over the interior dofs.
/// Any of f / v may be null; mass assembly is controlled by `with_mass`.
Fem2DSystem assemble_fem_2d(const MatrixField2D& a, const ScalarField2D* f,
                            const VectorField2D* v, bool with_mass, const Grid& grid) {
  const int n = grid.n;
  const double h = grid.h();
  const int dofs = (n - 2) * (n - 2);
  std::vector<Eigen::Triplet<double>> k_trip, m_trip;
  k_trip.reserve(static_cast<std::size_t>(n) * n * 16);
  if (with_mass) m_trip.reserve(static_cast<std::size_t>(n) * n * 16);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(dofs);
  const auto gauss = reference_gauss_points();

  for (int ci = 0; ci + 1 < n; ++ci) {
    for (int cj = 0; cj + 1 < n; ++cj) {
      Eigen::Matrix4d ke = Eigen::Matrix4d::Zero();
      Eigen::Matrix4d me = Eigen::Matrix4d::Zero();
      Eigen::Vector4d fe = Eigen::Vector4d::Zero();
      for (const auto& gp : gauss) {
        const double x = grid.node(ci) + gp.x() * h;
        const double y = grid.node(cj) + gp.y() * h;
        const double w = 0.25 * h * h;
        const Eigen::Matrix2d amat = a(x, y);
        require(amat(0, 0) > 0.0 && amat.determinant() > 0.0,
                SolverError::Kind::non_positive_coefficient,
                "diffusion tensor is not positive definite");
        std::array<Eigen::Vector2d, 4> grads;
        std::array<double, 4> vals;
        for (int l = 0; l < 4; ++l) {
          grads[l] = shape_gradient(l, gp.x(), gp.y(), h);
          vals[l] = shape_value(l, gp.x(), gp.y());
        }
        const Eigen::Vector2d vel = v ? (*v)(x, y) : Eigen::Vector2d::Zero();
        for (int l = 0; l < 4; ++l) {
          for (int m = 0; m < 4; ++m) {
            ke(l, m) += w * grads[l].dot(amat * grads[m]);
            if (v) ke(l, m) -= w * vel.dot(grads[l]) * vals[m];
            if (with_mass) me(l, m) += w * vals[l] * vals[m];
          }
          if (f) fe(l) += w * (*f)(x, y) * vals[l];
        }
      }
      for (int l = 0; l < 4; ++l) {
        const int gi = ci + (l & 1);
        const int gj = cj + ((l & 2) >> 1);
        if (gi == 0 || gi == n - 1 || gj == 0 || gj == n - 1) continue;
        const int row = interior_dof(gi, gj, n);
        load(row) += fe(l);
        for (int m = 0; m < 4; ++m) {
          const int mi = ci + (m & 1);
          const int mj = cj + ((m & 2) >> 1);
          if (mi == 0 || mi == n - 1 || mj == 0 || mj == n - 1) continue;
          const int col = interior_dof(mi, mj, n);
          k_trip.emplace_back(row, col, ke(l, m));
          if (with_mass) m_trip.emplace_back(row, col, me(l, m));
        }
      }
    }
  }

  Fem2DSystem sys;
  sys.stiffness.resize(dofs, dofs);
  sys.stiffness.setFromTriplets(k_trip.begin(), k_trip.end());
  if (with_mass) {
    sys.mass.resize(dofs, dofs);
    sys.mass.setFromTriplets(m_trip.begin(), m_trip.end());
  }
  sys.load = std::move(load);
  return sys;
}

Eigen::VectorXd interior_of(const Eigen::MatrixXd& nodal, int n) {
  Eigen::VectorXd flat((n - 2) * (n - 2));
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) flat(interior_dof(i, j, n)) = nodal(i, j);
  return flat;
}

void scatter_interior(const Eigen::VectorXd& flat, int n, double* slice) {
  for (int i = 0; i < n * n; ++i) slice[i] = 0.0;
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) slice[i * n + j] = flat(interior_dof(i, j, n));
}

}  // namespace

Eigen::VectorXd solve_elliptic_1d(const ScalarField1D& a, const ScalarField1D& f, int n) {
  check_space(n);
  const Grid grid{1, n};
  const double h = grid.h();
  const Eigen::VectorXd a_mid = midpoint_values(a, grid);
  require(a_mid.minCoeff() > 0.0, SolverError::Kind::non_positive_coefficient,
          "diffusion coefficient is not positive");

  const int m = n - 2;
  Eigen::VectorXd lower(m - 1), diag(m), upper(m - 1), rhs(m);
  for (int k = 0; k < m; ++k) {
    const int i = k + 1;
    diag(k) = -(a_mid(i - 1) + a_mid(i)) / (h * h);
    if (k + 1 < m) upper(k) = a_mid(i) / (h * h);
    if (k > 0) lower(k - 1) = a_mid(i - 1) / (h * h);
    rhs(k) = f(grid.node(i));
  }

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u.segment(1, m) = solve_tridiagonal(lower, diag, upper, rhs);
  return u;
}

SpaceTimeField solve_convdiff_1d(const ScalarField1D& a, const ScalarField1D& v,
                                 const Eigen::VectorXd& phi0, int n, int nt,
                                 double t_final) {
  check_space(n);
  check_time(nt, t_final);
  require(phi0.size() == n, SolverError::Kind::bad_argument,
          "initial condition size does not match the grid");
  const Grid grid{1, n};
  const TimeGrid time{nt, t_final};
  const double dt = time.dt();
  const Eigen::VectorXd a_mid = midpoint_values(a, grid);
  require(a_mid.minCoeff() > 0.0, SolverError::Kind::non_positive_coefficient,
          "diffusion coefficient is not positive");
  const Eigen::VectorXd v_node = nodal_values(v, grid);
  const Tridiag op = convdiff_operator(a_mid, v_node, grid);

  const int m = n - 2;
  // Crank-Nicolson: (I - dt/2 L) phi^{m+1} = (I + dt/2 L) phi^m.
  const Eigen::VectorXd implicit_lower = -0.5 * dt * op.lower;
  const Eigen::VectorXd implicit_diag = Eigen::VectorXd::Ones(m) - 0.5 * dt * op.diag;
  const Eigen::VectorXd implicit_upper = -0.5 * dt * op.upper;
  const Eigen::VectorXd explicit_lower = 0.5 * dt * op.lower;
  const Eigen::VectorXd explicit_diag = Eigen::VectorXd::Ones(m) + 0.5 * dt * op.diag;
  const Eigen::VectorXd explicit_upper = 0.5 * dt * op.upper;

  SpaceTimeField out;
  out.grid = grid;
  out.time = time;
  out.values.resize(nt, n);
  out.values.setZero();
  Eigen::VectorXd phi = phi0.segment(1, m);
  out.values.row(0).segment(1, m) = phi.transpose();
  for (int step = 1; step < nt; ++step) {
    const Eigen::VectorXd rhs =
        apply_tridiagonal(explicit_lower, explicit_diag, explicit_upper, phi);
    phi = solve_tridiagonal(implicit_lower, implicit_diag, implicit_upper, rhs);
    out.values.row(step).segment(1, m) = phi.transpose();
  }
  return out;
}

SpaceTimeField solve_wave_1d(const ScalarField1D& c, const ScalarField1D& v,
                             const ScalarField1D& e, const Eigen::VectorXd& rho0, int n,
                             int nt, double t_final) {
  check_space(n);
  check_time(nt, t_final);
  require(rho0.size() == n, SolverError::Kind::bad_argument,
          "initial condition size does not match the grid");
  const Grid grid{1, n};
  const TimeGrid time{nt, t_final};
  const double h = grid.h();
  const double dt = time.dt();
  const Eigen::VectorXd c_node = nodal_values(c, grid);
  const Eigen::VectorXd v_node = nodal_values(v, grid);
  const Eigen::VectorXd e_node = nodal_values(e, grid);
  require(c_node.minCoeff() > 0.0, SolverError::Kind::non_positive_coefficient,
          "squared wave speed is not positive");
  require(dt <= h / std::sqrt(c_node.maxCoeff()), SolverError::Kind::cfl_violation,
          "time step exceeds the stability bound h / max sqrt(c)");

  Eigen::VectorXd rho_init = rho0;
  rho_init(0) = 0.0;
  rho_init(n - 1) = 0.0;
  const auto apply = [&](const Eigen::VectorXd& rho) {
    Eigen::VectorXd lr = Eigen::VectorXd::Zero(n);
    for (int i = 1; i + 1 < n; ++i) {
      const double d2 = (rho(i + 1) - 2.0 * rho(i) + rho(i - 1)) / (h * h);
      const double d1 = (rho(i + 1) - rho(i - 1)) / (2.0 * h);
      lr(i) = c_node(i) * d2 - v_node(i) * d1 + e_node(i) * rho(i);
    }
    return lr;
  };

  SpaceTimeField out;
  out.grid = grid;
  out.time = time;
  out.values = leapfrog(rho_init, nt, dt, apply);
  return out;
}

Eigen::MatrixXd solve_elliptic_2d(const MatrixField2D& a, const ScalarField2D& f, int n) {
  check_space(n);
  const Grid grid{2, n};
  const Fem2DSystem sys = assemble_fem_2d(a, &f, nullptr, /*with_mass=*/false, grid);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(sys.stiffness);
  require(chol.info() == Eigen::Success, SolverError::Kind::indefinite_system,
          "stiffness factorization failed");
  const Eigen::VectorXd u = chol.solve(-sys.load);
  require(chol.info() == Eigen::Success, SolverError::Kind::indefinite_system,
          "stiffness solve failed");

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i + 1 < n; ++i)
    for (int j = 1; j + 1 < n; ++j) out(i, j) = u(interior_dof(i, j, n));
  return out;
}

SpaceTimeField solve_convdiff_2d(const MatrixField2D& a, const VectorField2D& v,
                                 const Eigen::MatrixXd& phi0, int n, int nt,
                                 double t_final) {
  check_space(n);
  check_time(nt, t_final);
  require(phi0.rows() == n && phi0.cols() == n, SolverError::Kind::bad_argument,
          "initial condition shape does not match the grid");
  const Grid grid{2, n};
  const TimeGrid time{nt, t_final};
  const double dt = time.dt();
  const Fem2DSystem sys = assemble_fem_2d(a, nullptr, &v, /*with_mass=*/true, grid);

  // Crank-Nicolson: (M + dt/2 S) phi^{m+1} = (M - dt/2 S) phi^m, factored once.
  const Eigen::SparseMatrix<double> implicit_mat = sys.mass + (0.5 * dt) * sys.stiffness;
  const Eigen::SparseMatrix<double> explicit_mat = sys.mass - (0.5 * dt) * sys.stiffness;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(implicit_mat);
  require(lu.info() == Eigen::Success, SolverError::Kind::indefinite_system,
          "implicit operator factorization failed");

  SpaceTimeField out;
  out.grid = grid;
  out.time = time;
  out.values.resize(nt, n * n);
  Eigen::VectorXd phi = interior_of(phi0, n);
  scatter_interior(phi, n, out.values.row(0).data());
  for (int step = 1; step < nt; ++step) {
    phi = lu.solve(explicit_mat * phi);
    require(lu.info() == Eigen::Success, SolverError::Kind::indefinite_system,
            "implicit operator solve failed");
    scatter_interior(phi, n, out.values.row(step).data());
  }
  return out;
}

SpaceTimeField solve_wave_2d(const MatrixField2D& c, const VectorField2D& v,
                             const Eigen::MatrixXd& rho0, int n, int nt, double t_final) {
  check_space(n);
  check_time(nt, t_final);
  require(rho0.rows() == n && rho0.cols() == n, SolverError::Kind::bad_argument,
          "initial condition shape does not match the grid");
  const Grid grid{2, n};
  const TimeGrid time{nt, t_final};
  const double h = grid.h();
  const double dt = time.dt();

  Eigen::MatrixXd c11(n, n), c12(n, n), c22(n, n), v1(n, n), v2(n, n);
  double max_eig = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::Matrix2d cm = c(grid.node(i), grid.node(j));
      require(cm(0, 0) > 0.0 && cm.determinant() > 0.0,
              SolverError::Kind::non_positive_coefficient,
              "wave-speed tensor is not positive definite");
      c11(i, j) = cm(0, 0);
      c12(i, j) = 0.5 * (cm(0, 1) + cm(1, 0));
      c22(i, j) = cm(1, 1);
      const double tr = cm(0, 0) + cm(1, 1);
      const double gap = std::sqrt(std::max(tr * tr - 4.0 * cm.determinant(), 0.0));
      max_eig = std::max(max_eig, 0.5 * (tr + gap));
      const Eigen::Vector2d vel = v(grid.node(i), grid.node(j));
      v1(i, j) = vel(0);
      v2(i, j) = vel(1);
    }
  }
  require(dt <= h / std::sqrt(2.0 * max_eig), SolverError::Kind::cfl_violation,
          "time step exceeds the stability bound h / sqrt(2 lambda_max)");

  Eigen::MatrixXd rho_init = rho0;
  rho_init.row(0).setZero();
  rho_init.row(n - 1).setZero();
  rho_init.col(0).setZero();
  rho_init.col(n - 1).setZero();

  const auto apply = [&](const Eigen::VectorXd& flat) {
    Eigen::Map<const Eigen::MatrixXd> rho(flat.data(), n, n);
    Eigen::VectorXd out_flat = Eigen::VectorXd::Zero(n * n);
    Eigen::Map<Eigen::MatrixXd> lr(out_flat.data(), n, n);
    for (int i = 1; i + 1 < n; ++i) {
      for (int j = 1; j + 1 < n; ++j) {
        const double dxx = (rho(i + 1, j) - 2.0 * rho(i, j) + rho(i - 1, j)) / (h * h);
        const double dyy = (rho(i, j + 1) - 2.0 * rho(i, j) + rho(i, j - 1)) / (h * h);
        const double dxy = (rho(i + 1, j + 1) - rho(i + 1, j - 1) - rho(i - 1, j + 1) +
                            rho(i - 1, j - 1)) /
                           (4.0 * h * h);
        const double dx = (rho(i + 1, j) - rho(i - 1, j)) / (2.0 * h);
        const double dy = (rho(i, j + 1) - rho(i, j - 1)) / (2.0 * h);
        lr(i, j) = c11(i, j) * dxx + 2.0 * c12(i, j) * dxy + c22(i, j) * dyy -
                   v1(i, j) * dx - v2(i, j) * dy;
      }
    }
    return out_flat;
  };

  // Column-major nodal matrix vs row-major slice layout: work on a flat
  // column-major copy, then emit slices as value(i * n + j) = rho(x_i, y_j).
  Eigen::VectorXd flat0(n * n);
  Eigen::Map<Eigen::MatrixXd>(flat0.data(), n, n) = rho_init;
  const RowMatrixXd trajectory = leapfrog(flat0, nt, dt, apply);

  SpaceTimeField out;
  out.grid = grid;
  out.time = time;
  out.values.resize(nt, n * n);
  for (int m = 0; m < nt; ++m) {
    Eigen::Map<const Eigen::MatrixXd> rho(trajectory.row(m).data(), n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out.values(m, i * n + j) = rho(i, j);
  }
  return out;
}

}  // namespace covaug
