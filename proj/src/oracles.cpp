#include "covaug/oracles.hpp"

#include <cmath>

namespace covaug {

namespace {

/// Particular antiderivative: S'(x) solves y' + y = f for the trigonometric
/// right-hand side, and S is its primitive, so S'' + S' = f exactly.
double particular_primitive(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double x) {
  double s = (a.size() > 0 ? a(0) : 0.0) * x;
  const int modes = static_cast<int>(std::max(a.size() - 1, b.size()));
  for (int n = 1; n <= modes; ++n) {
    const double an = n < a.size() ? a(n) : 0.0;
    const double bn = n <= b.size() ? b(n - 1) : 0.0;
    const double k = static_cast<double>(n);
    s += ((an - k * bn) * std::sin(k * x) - (bn + k * an) * std::cos(k * x)) /
         (k * (k * k + 1.0));
  }
  return s;
}

double particular_derivative(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double x) {
  double s = a.size() > 0 ? a(0) : 0.0;
  const int modes = static_cast<int>(std::max(a.size() - 1, b.size()));
  for (int n = 1; n <= modes; ++n) {
    const double an = n < a.size() ? a(n) : 0.0;
    const double bn = n <= b.size() ? b(n - 1) : 0.0;
    const double k = static_cast<double>(n);
    s += ((an - k * bn) * std::cos(k * x) + (bn + k * an) * std::sin(k * x)) /
         (k * k + 1.0);
  }
  return s;
}

}  // namespace

double ConvDiffExact::operator()(double x, double t) const {
  const double pi = std::acos(-1.0);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    sum += coeffs(i) * std::sin(k * pi * x) * std::exp(-(k * pi) * (k * pi) * t);
  }
  return std::exp(0.5 * x - 0.25 * t) * sum;
}

Eigen::VectorXd ConvDiffExact::at(const Eigen::VectorXd& xs, double t) const {
  Eigen::VectorXd out(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) out(i) = (*this)(xs(i), t);
  return out;
}

double EllipticExact::operator()(double x) const {
  return particular_primitive(cos_coeffs, sin_coeffs, x) - c1 * std::exp(-x) + c2;
}

double EllipticExact::deriv(double x) const {
  return particular_derivative(cos_coeffs, sin_coeffs, x) + c1 * std::exp(-x);
}

double EllipticExact::forcing(double x) const {
  double f = cos_coeffs.size() > 0 ? cos_coeffs(0) : 0.0;
  const int modes =
      static_cast<int>(std::max(cos_coeffs.size() - 1, sin_coeffs.size()));
  for (int n = 1; n <= modes; ++n) {
    const double k = static_cast<double>(n);
    if (n < cos_coeffs.size()) f += cos_coeffs(n) * std::cos(k * x);
    if (n <= sin_coeffs.size()) f += sin_coeffs(n - 1) * std::sin(k * x);
  }
  return f;
}

double EllipticExact::diffusion(double x) const { return std::exp(x); }

double EllipticExact::divergence_forcing(double x) const {
  return std::exp(x) * forcing(x);
}

EllipticExact make_elliptic_exact(const Eigen::VectorXd& cos_coeffs,
                                  const Eigen::VectorXd& sin_coeffs) {
  EllipticExact out;
  out.cos_coeffs = cos_coeffs;
  out.sin_coeffs = sin_coeffs;
  const double s0 = particular_primitive(cos_coeffs, sin_coeffs, 0.0);
  const double s1 = particular_primitive(cos_coeffs, sin_coeffs, 1.0);
  out.c1 = (s1 - s0) / (std::exp(-1.0) - 1.0);
  out.c2 = out.c1 - s0;
  return out;
}

}  // namespace covaug
