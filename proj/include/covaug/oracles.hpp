#pragma once

#include <Eigen/Dense>

namespace covaug {

/// Closed-form solution of  dphi/dt + d(v phi)/dx = d(a dphi/dx)/dx  with
/// a = v = 1 on (0, 1), homogeneous Dirichlet conditions:
///   phi(x, t) = exp(x/2 - t/4) * sum_k c_k sin(k pi x) exp(-(k pi)^2 t).
/// The initial condition is phi(x, 0) = exp(x/2) sum_k c_k sin(k pi x).
struct ConvDiffExact {
  Eigen::VectorXd coeffs;  // c_1 .. c_K

  double operator()(double x, double t) const;
  Eigen::VectorXd at(const Eigen::VectorXd& xs, double t) const;
};

/// Closed-form solution of  phi'' + phi' = f  on (0, 1), phi(0) = phi(1) = 0,
/// with a trigonometric right-hand side
///   f(x) = a_0 + sum_n a_n cos(n x) + sum_n b_n sin(n x)   (radian modes).
/// Multiplying by e^x turns this into the divergence-form identity
///   d/dx( e^x phi'(x) ) = e^x f(x),
/// so (diffusion, solution, forcing) = (e^x, phi, e^x f) is an exact triple
/// for the stationary diffusion equation.
struct EllipticExact {
  Eigen::VectorXd cos_coeffs;  // a_0 .. a_N (a_0 is the constant term)
  Eigen::VectorXd sin_coeffs;  // b_1 .. b_N
  double c1 = 0.0;             // homogeneous part: -c1 e^{-x} + c2
  double c2 = 0.0;

  double operator()(double x) const;
  double deriv(double x) const;
  double forcing(double x) const;  // f(x)

  double diffusion(double x) const;            // e^x
  double divergence_forcing(double x) const;   // e^x f(x)
};

/// Fits the boundary constants so that phi(0) = phi(1) = 0.
EllipticExact make_elliptic_exact(const Eigen::VectorXd& cos_coeffs,
                                  const Eigen::VectorXd& sin_coeffs);

}  // namespace covaug
