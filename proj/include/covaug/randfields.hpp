#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>

namespace covaug {

/// Families of random 1D fields on [0, 1].
enum class TrigFieldKind {
  cosine,  ///< sum_{k=0..N} c_k cos(2 pi k x + p_k)   (k = 0 is a constant)
  sine,    ///< sum_{k=0..N} c_k sin(pi (k+1) x)       (vanishes at 0 and 1)
};

/// Truncated trigonometric field, optionally squared (for positivity) and
/// scaled: value = scale * S(x) or scale * S(x)^2.
struct TrigField1D {
  TrigFieldKind kind = TrigFieldKind::cosine;
  Eigen::VectorXd coeffs;  ///< c_0 .. c_N
  Eigen::VectorXd phases;  ///< p_0 .. p_N (cosine kind only; empty otherwise)
  double scale = 1.0;
  bool squared = false;

  double operator()(double x) const;
  Eigen::VectorXd at(const Eigen::VectorXd& xs) const;
};

/// Random cosine field; coefficients then phases drawn standard normal.
/// With `decay`, coefficient k is damped by 1/max(k,1)^2.
TrigField1D sample_cosine_field(std::uint64_t seed, int modes, double scale = 1.0,
                                bool decay = false);

/// Cosine field made uniformly positive: p_0 = 0 and c_0 = sum_{k>0} |c_k| +
/// margin, so min_x S(x) >= margin (before scaling).
TrigField1D sample_positive_cosine_field(std::uint64_t seed, int modes, double scale = 1.0,
                                         bool decay = false, double margin = 1e-2);

/// Random sine (Dirichlet) field; coefficients standard normal.  With
/// `decay`, coefficient k is damped by 1/(k+1)^2 (mode k has frequency
/// pi (k+1), so the damping is 1/mode^2 as in the cosine family).
TrigField1D sample_sine_field(std::uint64_t seed, int modes, double scale = 1.0,
                              bool decay = false);

/// Random real 2D field from a full complex Fourier square:
///
///   f(x, y) = scale * Re sum_{m,n = -M..M} (re_mn + i im_mn)
///                e^{2 pi i (m x + n y)}
///
/// with mode (m, n) stored at (m + M, n + M).
struct Fourier2DField {
  int max_mode = 0;  ///< M
  Eigen::MatrixXd re;
  Eigen::MatrixXd im;
  double scale = 1.0;

  double operator()(double x, double y) const;

  /// Values on a tensor grid; out(i, j) = f(xs[i], ys[j]).
  Eigen::MatrixXd on_grid(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys) const;
};

/// Coefficients drawn standard normal, row-major over modes, real part
/// before imaginary part.
Fourier2DField sample_fourier_field(std::uint64_t seed, int max_mode, double scale = 1.0);

/// Symmetric positive-definite matrix field A(x, y) = I + L L^T with
///
///   L = [ |l11|   0   ]
///       [  l21  |l22| ]
///
/// built from three independent Fourier2DFields; every eigenvalue is >= 1.
/// With `diagonal_only`, A is restricted to diag(A11, A11).
struct SpdField2D {
  Fourier2DField l11, l21, l22;
  bool diagonal_only = false;

  Eigen::Matrix2d operator()(double x, double y) const;

  /// Channel grids {a11, a12, a22}; each out(i, j) = A..(xs[i], ys[j]).
  std::array<Eigen::MatrixXd, 3> on_grid(const Eigen::VectorXd& xs,
                                         const Eigen::VectorXd& ys) const;
};

/// Entry fields drawn from sub-seeds (l11, l21, l22) = (0, 1, 2).
SpdField2D sample_spd_field(std::uint64_t seed, int max_mode, double scale = 1.0);

/// Drop the off-diagonal part and set A22 := A11.
SpdField2D restrict_to_diagonal(SpdField2D field);

}  // namespace covaug
