#include "covaug/interp.hpp"

#include <cmath>
#include <stdexcept>

namespace covaug {

namespace {

constexpr double kQueryTolerance = 1e-9;

/// Finite-difference node slopes (d/dt, grid spacing 1/(n-1)): central in
/// the interior; third-order one-sided at the ends when four points exist,
/// second-order for n = 3, first-order for n = 2.
Eigen::VectorXd node_slopes(const Eigen::Ref<const Eigen::VectorXd>& f) {
  const Eigen::Index n = f.size();
  const double h = 1.0 / static_cast<double>(n - 1);
  Eigen::VectorXd m(n);
  if (n == 2) {
    m[0] = m[1] = (f[1] - f[0]) / h;
    return m;
  }
  for (Eigen::Index i = 1; i + 1 < n; ++i) m[i] = (f[i + 1] - f[i - 1]) / (2 * h);
  if (n == 3) {
    m[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
    m[2] = (3 * f[2] - 4 * f[1] + f[0]) / (2 * h);
  } else {
    m[0] = (-11 * f[0] + 18 * f[1] - 9 * f[2] + 2 * f[3]) / (6 * h);
    m[n - 1] = (11 * f[n - 1] - 18 * f[n - 2] + 9 * f[n - 3] - 2 * f[n - 4]) / (6 * h);
  }
  return m;
}

/// Cell index and local coordinate s in [0, 1] for a query in [0, 1].
struct CellCoord {
  Eigen::Index cell;
  double s;
};

CellCoord locate(double t, Eigen::Index n) {
  if (t < -kQueryTolerance || t > 1.0 + kQueryTolerance)
    throw std::domain_error("resample: query outside [0, 1]");
  const double clamped = std::min(std::max(t, 0.0), 1.0);
  const double scaled = clamped * static_cast<double>(n - 1);
  Eigen::Index cell = static_cast<Eigen::Index>(scaled);
  if (cell > n - 2) cell = n - 2;
  return {cell, scaled - static_cast<double>(cell)};
}

/// Hermite basis weights for values (w0, w1) and slopes (w2, w3); the slope
/// weights carry the cell width so slopes can be given in d/dt units.
struct HermiteWeights {
  double w[4];
};

HermiteWeights hermite_weights(double s, double h) {
  const double s2 = s * s, s3 = s2 * s;
  return {{2 * s3 - 3 * s2 + 1, -2 * s3 + 3 * s2, h * (s3 - 2 * s2 + s), h * (s3 - s2)}};
}

}  // namespace

CubicHermite1D::CubicHermite1D(Eigen::VectorXd values) : values_(std::move(values)) {
  if (values_.size() < 2) throw std::invalid_argument("CubicHermite1D: need n >= 2");
  slopes_ = node_slopes(values_);
}

double CubicHermite1D::operator()(double t) const {
  const Eigen::Index n = values_.size();
  const auto [cell, s] = locate(t, n);
  const double h = 1.0 / static_cast<double>(n - 1);
  const HermiteWeights w = hermite_weights(s, h);
  return w.w[0] * values_[cell] + w.w[1] * values_[cell + 1] + w.w[2] * slopes_[cell] +
         w.w[3] * slopes_[cell + 1];
}

CubicHermite2D::CubicHermite2D(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 2)
    throw std::invalid_argument("CubicHermite2D: need both extents >= 2");
  const Eigen::Index nx = values_.rows(), ny = values_.cols();
  dx_.resize(nx, ny);
  dy_.resize(nx, ny);
  dxy_.resize(nx, ny);
  for (Eigen::Index j = 0; j < ny; ++j) dx_.col(j) = node_slopes(values_.col(j));
  for (Eigen::Index i = 0; i < nx; ++i)
    dy_.row(i) = node_slopes(values_.row(i).transpose()).transpose();
  // Cross derivative: x-slopes of the y-slopes (the slope operators commute).
  for (Eigen::Index j = 0; j < ny; ++j) dxy_.col(j) = node_slopes(dy_.col(j));
}

double CubicHermite2D::operator()(double x, double y) const {
  const Eigen::Index nx = values_.rows(), ny = values_.cols();
  const auto [ci, sx] = locate(x, nx);
  const auto [cj, sy] = locate(y, ny);
  const HermiteWeights wx = hermite_weights(sx, 1.0 / static_cast<double>(nx - 1));
  const HermiteWeights wy = hermite_weights(sy, 1.0 / static_cast<double>(ny - 1));

  // 4x4 tensor patch: rows/cols ordered (value at cell, value at cell+1,
  // slope at cell, slope at cell+1) along x and y respectively.
  const Eigen::Index i0 = ci, i1 = ci + 1, j0 = cj, j1 = cj + 1;
  const double g[4][4] = {
      {values_(i0, j0), values_(i0, j1), dy_(i0, j0), dy_(i0, j1)},
      {values_(i1, j0), values_(i1, j1), dy_(i1, j0), dy_(i1, j1)},
      {dx_(i0, j0), dx_(i0, j1), dxy_(i0, j0), dxy_(i0, j1)},
      {dx_(i1, j0), dx_(i1, j1), dxy_(i1, j0), dxy_(i1, j1)},
  };
  double sum = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) sum += wx.w[p] * wy.w[q] * g[p][q];
  return sum;
}

Eigen::VectorXd resample_field(const Eigen::VectorXd& values, const Eigen::VectorXd& queries) {
  const CubicHermite1D interp(values);
  Eigen::VectorXd out(queries.size());
  for (Eigen::Index q = 0; q < queries.size(); ++q) out[q] = interp(queries[q]);
  return out;
}

Eigen::VectorXd resample_field(const Eigen::MatrixXd& values,
                               const Eigen::Matrix2Xd& queries) {
  const CubicHermite2D interp(values);
  Eigen::VectorXd out(queries.cols());
  for (Eigen::Index q = 0; q < queries.cols(); ++q)
    out[q] = interp(queries(0, q), queries(1, q));
  return out;
}

}  // namespace covaug
