#pragma once

#include "covaug/solvers.hpp"

#include <Eigen/Dense>

namespace covaug {

/// Mean relative L2 error over samples (one row per sample):
///   (1/N) sum_i ||p_i - t_i|| / ||t_i||.
double rel_l2_error(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& targets);

/// Composite trapezoid rule for nodal values on a uniform grid of spacing h
/// (tensor-product weights in 2D).
double trapezoid(const Eigen::VectorXd& values, double h);
double trapezoid(const Eigen::MatrixXd& values, double h);

/// Improvement of `augmented_error` over `baseline_error`, in percent:
///   (1 - augmented / baseline) * 100.
double relative_gain(double baseline_error, double augmented_error);

/// Finite-difference residual magnitudes, normalized by the size of the
/// diffusion term over the same interior points.
struct ResidualReport {
  double rel_l2 = 0.0;
  double rel_linf = 0.0;

  bool within(double tol) const { return rel_l2 <= tol && rel_linf <= tol; }
};

/// Residual of  d(a u')' = f  on nodal data: conservative staggered fluxes
/// with midpoint-averaged a, one-node boundary exclusion.
ResidualReport residual_elliptic_1d(const Eigen::VectorXd& a, const Eigen::VectorXd& u,
                                    const Eigen::VectorXd& f, double h);

/// Residual of  dphi/dt + d(v phi)/dx = d(a dphi/dx)/dx  on a trajectory:
/// central time differences over interior levels.
ResidualReport residual_convdiff_1d(const Eigen::VectorXd& a, const Eigen::VectorXd& v,
                                    const SpaceTimeField& phi);

/// Residual of  d2rho/dt2 + v drho/dx = c d2rho/dx2 + e rho  on a trajectory.
ResidualReport residual_wave_1d(const Eigen::VectorXd& c, const Eigen::VectorXd& v,
                                const Eigen::VectorXd& e, const SpaceTimeField& rho);

/// Residual of  d_i(A^{ij} d_j u) = f  on nodal 2D data with A given by its
/// channels (sampled at the nodes, entry (i, j) = value at (x_i, y_j)).
ResidualReport residual_elliptic_2d(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a12,
                                    const Eigen::MatrixXd& a22, const Eigen::MatrixXd& u,
                                    const Eigen::MatrixXd& f, double h);

/// Residual of  dphi/dt + d_i(v^i phi) = d_i(A^{ij} d_j phi)  on a trajectory.
ResidualReport residual_convdiff_2d(const Eigen::MatrixXd& a11, const Eigen::MatrixXd& a12,
                                    const Eigen::MatrixXd& a22, const Eigen::MatrixXd& v1,
                                    const Eigen::MatrixXd& v2, const SpaceTimeField& phi);

/// Residual of  d2rho/dt2 + v^i d_i rho = C^{ij} d2_{ij} rho  on a trajectory.
ResidualReport residual_wave_2d(const Eigen::MatrixXd& c11, const Eigen::MatrixXd& c12,
                                const Eigen::MatrixXd& c22, const Eigen::MatrixXd& v1,
                                const Eigen::MatrixXd& v2, const SpaceTimeField& rho);

}  // namespace covaug
