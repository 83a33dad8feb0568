#pragma once

#include <Eigen/Dense>

#include <vector>

#include "covaug/maps.hpp"
#include "covaug/solvers.hpp"

namespace covaug {

// Nodal data bundles for the three equation families, all on the uniform
// node-centered grid over [0, 1]^D.  Time-dependent targets are stored as a
// SpaceTimeField (one time level per row, 2D slices flattened x-major).

/// Stationary diffusion  -div(a grad u) = f,  u = 0 on the boundary.
struct EllipticFields1D {
  Eigen::VectorXd a;
  Eigen::VectorXd u;
  Eigen::VectorXd f;
};

/// 2D variant; the symmetric diffusion tensor is carried as three channels.
struct EllipticFields2D {
  Eigen::MatrixXd a11;
  Eigen::MatrixXd a12;
  Eigen::MatrixXd a22;
  Eigen::MatrixXd u;
  Eigen::MatrixXd f;
};

/// Conservative convection-diffusion  d phi/dt + div(v phi) = div(a grad phi).
struct ConvDiffFields1D {
  Eigen::VectorXd a;
  Eigen::VectorXd v;
  SpaceTimeField phi;
};

struct ConvDiffFields2D {
  Eigen::MatrixXd a11;
  Eigen::MatrixXd a12;
  Eigen::MatrixXd a22;
  Eigen::MatrixXd v1;
  Eigen::MatrixXd v2;
  SpaceTimeField phi;
};

/// Two-way wave  d2 rho/dt2 = div(c grad rho) + v . grad rho + e rho.
struct WaveFields1D {
  Eigen::VectorXd c;
  Eigen::VectorXd v;
  Eigen::VectorXd e;
  SpaceTimeField rho;
};

/// 2D variant (no zeroth-order source channel).
struct WaveFields2D {
  Eigen::MatrixXd c11;
  Eigen::MatrixXd c12;
  Eigen::MatrixXd c22;
  Eigen::MatrixXd v1;
  Eigen::MatrixXd v2;
  SpaceTimeField rho;
};

// Pull-backs under a smooth change of coordinates x = map(xi).  Each
// transform rewrites the problem on the new n-point grid so that the written
// form of its equation is preserved exactly:
//
//   - solution values u and rho carry over unchanged (scalars),
//   - phi scales with the Jacobian determinant (a density), so its spatial
//     integral is conserved,
//   - diffusion tensors transform by congruence with the inverse Jacobian
//     (times the determinant for the divergence-form elliptic problem),
//   - velocities gain curvature terms built from the second derivatives of
//     the map, absorbing what the product rule sheds.
//
// The first overload of each transform takes the source fields as callables
// on the original coordinates and evaluates them directly at the mapped
// points; all Jacobian quantities are analytic from the map.  The second
// overload resamples gridded channels with cubic Hermite interpolation and
// feeds them through the first.  Maps that fold over (non-positive Jacobian
// determinant) raise std::domain_error; mismatched channel shapes raise
// std::invalid_argument.

EllipticFields1D transform_elliptic_1d(const ScalarField1D& a, const ScalarField1D& u,
                                       const ScalarField1D& f, const Map1D& map, int n);
EllipticFields1D transform_elliptic_1d(const EllipticFields1D& fields, const Map1D& map);

ConvDiffFields1D transform_convdiff_1d(const ScalarField1D& a, const ScalarField1D& v,
                                       const std::vector<ScalarField1D>& phi_slices,
                                       const Map1D& map, int n, double t_final);
ConvDiffFields1D transform_convdiff_1d(const ConvDiffFields1D& fields, const Map1D& map);

WaveFields1D transform_wave_1d(const ScalarField1D& c, const ScalarField1D& v,
                               const ScalarField1D& e,
                               const std::vector<ScalarField1D>& rho_slices, const Map1D& map,
                               int n, double t_final);
WaveFields1D transform_wave_1d(const WaveFields1D& fields, const Map1D& map);

EllipticFields2D transform_elliptic_2d(const MatrixField2D& a, const ScalarField2D& u,
                                       const ScalarField2D& f, const Map2D& map, int n);
EllipticFields2D transform_elliptic_2d(const EllipticFields2D& fields, const Map2D& map);

ConvDiffFields2D transform_convdiff_2d(const MatrixField2D& a, const VectorField2D& v,
                                       const std::vector<ScalarField2D>& phi_slices,
                                       const Map2D& map, int n, double t_final);
ConvDiffFields2D transform_convdiff_2d(const ConvDiffFields2D& fields, const Map2D& map);

WaveFields2D transform_wave_2d(const MatrixField2D& c, const VectorField2D& v,
                               const std::vector<ScalarField2D>& rho_slices, const Map2D& map,
                               int n, double t_final);
WaveFields2D transform_wave_2d(const WaveFields2D& fields, const Map2D& map);

}  // namespace covaug
