#pragma once

#include <Eigen/Dense>

namespace covaug {

/// Piecewise-cubic Hermite interpolant of nodal values on the uniform grid
/// t_i = i/(n-1) over [0, 1].  Node slopes come from finite differences:
/// central in the interior, third-order one-sided at the ends (n >= 4), so
/// the interpolant is exact at nodes, reproduces linear functions exactly,
/// and converges at O(h^3) for smooth data.  Queries must lie in [0, 1] up
/// to a 1e-9 rounding allowance.
class CubicHermite1D {
 public:
  explicit CubicHermite1D(Eigen::VectorXd values);  // n >= 2

  double operator()(double t) const;
  Eigen::Index size() const { return values_.size(); }

 private:
  Eigen::VectorXd values_;
  Eigen::VectorXd slopes_;
};

/// Tensor product of the 1D scheme on a uniform n1 x n2 grid over [0, 1]^2;
/// values(i, j) = f(x_i, y_j) with x along the first index.
class CubicHermite2D {
 public:
  explicit CubicHermite2D(Eigen::MatrixXd values);  // both extents >= 2

  double operator()(double x, double y) const;

 private:
  Eigen::MatrixXd values_;  // f
  Eigen::MatrixXd dx_;      // df/dx
  Eigen::MatrixXd dy_;      // df/dy
  Eigen::MatrixXd dxy_;     // d2f/dxdy
};

/// Hermite resampling of a gridded field at arbitrary points.
Eigen::VectorXd resample_field(const Eigen::VectorXd& values, const Eigen::VectorXd& queries);

/// 2D variant; one query point per column of `queries`.
Eigen::VectorXd resample_field(const Eigen::MatrixXd& values,
                               const Eigen::Matrix2Xd& queries);

}  // namespace covaug
