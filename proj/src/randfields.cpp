#include "covaug/randfields.hpp"

#include "covaug/rng.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace covaug {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_modes(int modes) {
  if (modes < 0) throw std::invalid_argument("field sampler: modes must be >= 0");
}

Eigen::VectorXd draw_normals(RandomStream& rs, int count) {
  Eigen::VectorXd v(count);
  for (int i = 0; i < count; ++i) v[i] = rs.normal();
  return v;
}

/// One-column complex phase table: w[k] = e^{2 pi i (k - M) t}.
Eigen::VectorXcd phase_column(double t, int max_mode) {
  Eigen::VectorXcd w(2 * max_mode + 1);
  for (int k = -max_mode; k <= max_mode; ++k)
    w[k + max_mode] = std::polar(1.0, kTwoPi * k * t);
  return w;
}

}  // namespace

double TrigField1D::operator()(double x) const {
  double sum = 0.0;
  if (kind == TrigFieldKind::cosine) {
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
      sum += coeffs[k] * std::cos(kTwoPi * static_cast<double>(k) * x + phases[k]);
  } else {
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
      sum += coeffs[k] * std::sin(std::numbers::pi * static_cast<double>(k + 1) * x);
  }
  if (squared) sum *= sum;
  return scale * sum;
}

Eigen::VectorXd TrigField1D::at(const Eigen::VectorXd& xs) const {
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = (*this)(xs[i]);
  return out;
}

TrigField1D sample_cosine_field(std::uint64_t seed, int modes, double scale, bool decay) {
  check_modes(modes);
  RandomStream rs(seed);
  TrigField1D f;
  f.kind = TrigFieldKind::cosine;
  f.coeffs = draw_normals(rs, modes + 1);
  f.phases = draw_normals(rs, modes + 1);
  f.scale = scale;
  if (decay)
    for (int k = 0; k <= modes; ++k) f.coeffs[k] /= static_cast<double>(std::max(k, 1) * std::max(k, 1));
  return f;
}

TrigField1D sample_positive_cosine_field(std::uint64_t seed, int modes, double scale,
                                         bool decay, double margin) {
  if (!(margin > 0.0))
    throw std::invalid_argument("sample_positive_cosine_field: margin must be positive");
  TrigField1D f = sample_cosine_field(seed, modes, scale, decay);
  // The constant term dominates the rest of the series, so
  // S(x) >= c_0 - sum_{k>0} |c_k| = margin everywhere.
  f.phases[0] = 0.0;
  f.coeffs[0] = f.coeffs.tail(modes).cwiseAbs().sum() + margin;
  return f;
}

TrigField1D sample_sine_field(std::uint64_t seed, int modes, double scale, bool decay) {
  check_modes(modes);
  RandomStream rs(seed);
  TrigField1D f;
  f.kind = TrigFieldKind::sine;
  f.coeffs = draw_normals(rs, modes + 1);
  f.scale = scale;
  if (decay)
    for (int k = 0; k <= modes; ++k) f.coeffs[k] /= static_cast<double>((k + 1) * (k + 1));
  return f;
}

double Fourier2DField::operator()(double x, double y) const {
  const Eigen::MatrixXcd c = re.cast<std::complex<double>>() +
                             std::complex<double>(0, 1) * im.cast<std::complex<double>>();
  const Eigen::VectorXcd wx = phase_column(x, max_mode);
  const Eigen::VectorXcd wy = phase_column(y, max_mode);
  return scale * (wx.transpose() * c * wy).value().real();
}

Eigen::MatrixXd Fourier2DField::on_grid(const Eigen::VectorXd& xs,
                                        const Eigen::VectorXd& ys) const {
  const Eigen::MatrixXcd c = re.cast<std::complex<double>>() +
                             std::complex<double>(0, 1) * im.cast<std::complex<double>>();
  Eigen::MatrixXcd wx(xs.size(), 2 * max_mode + 1), wy(ys.size(), 2 * max_mode + 1);
  for (Eigen::Index i = 0; i < xs.size(); ++i) wx.row(i) = phase_column(xs[i], max_mode);
  for (Eigen::Index j = 0; j < ys.size(); ++j) wy.row(j) = phase_column(ys[j], max_mode);
  return scale * (wx * c * wy.transpose()).real();
}

Fourier2DField sample_fourier_field(std::uint64_t seed, int max_mode, double scale) {
  check_modes(max_mode);
  RandomStream rs(seed);
  const int w = 2 * max_mode + 1;
  Fourier2DField f;
  f.max_mode = max_mode;
  f.re.resize(w, w);
  f.im.resize(w, w);
  f.scale = scale;
  for (int r = 0; r < w; ++r)
    for (int c = 0; c < w; ++c) {
      f.re(r, c) = rs.normal();
      f.im(r, c) = rs.normal();
    }
  return f;
}

Eigen::Matrix2d SpdField2D::operator()(double x, double y) const {
  const double a = std::abs(l11(x, y));
  const double b = l21(x, y);
  const double c = std::abs(l22(x, y));
  Eigen::Matrix2d m;
  m(0, 0) = 1.0 + a * a;
  m(0, 1) = m(1, 0) = a * b;
  m(1, 1) = 1.0 + b * b + c * c;
  if (diagonal_only) {
    m(0, 1) = m(1, 0) = 0.0;
    m(1, 1) = m(0, 0);
  }
  return m;
}

std::array<Eigen::MatrixXd, 3> SpdField2D::on_grid(const Eigen::VectorXd& xs,
                                                   const Eigen::VectorXd& ys) const {
  const Eigen::ArrayXXd a = l11.on_grid(xs, ys).array().abs();
  const Eigen::ArrayXXd b = l21.on_grid(xs, ys).array();
  const Eigen::ArrayXXd c = l22.on_grid(xs, ys).array().abs();
  std::array<Eigen::MatrixXd, 3> out;
  out[0] = (1.0 + a * a).matrix();
  if (diagonal_only) {
    out[1] = Eigen::MatrixXd::Zero(xs.size(), ys.size());
    out[2] = out[0];
  } else {
    out[1] = (a * b).matrix();
    out[2] = (1.0 + b * b + c * c).matrix();
  }
  return out;
}

SpdField2D sample_spd_field(std::uint64_t seed, int max_mode, double scale) {
  SpdField2D f;
  f.l11 = sample_fourier_field(derive_seed(seed, 0), max_mode, scale);
  f.l21 = sample_fourier_field(derive_seed(seed, 1), max_mode, scale);
  f.l22 = sample_fourier_field(derive_seed(seed, 2), max_mode, scale);
  return f;
}

SpdField2D restrict_to_diagonal(SpdField2D field) {
  field.diagonal_only = true;
  return field;
}

}  // namespace covaug
