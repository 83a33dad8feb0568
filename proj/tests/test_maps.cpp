/// @file
/// @brief Monotone coordinate maps and their Jacobian calculus.

#include "covaug/maps.hpp"

#include "covaug/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace covaug;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

// Fixture A: single cosine mode, c1 = 1, beta = 1 -> c0 = 2,
//   y(t) = t + sin(2 pi t) / (4 pi).
Map1D fixture_a() { return Map1D(trig_density(vec({1.0}), vec({0.0}), 1.0)); }

// Fixture B: two modes, c = (0.3, -0.2), d = (0.5, 0.1), beta = 0.7 -> c0 = 1.8.
Map1D fixture_b() {
  return Map1D(trig_density(vec({0.3, -0.2}), vec({0.5, 0.1}), 0.7));
}

// Composite-trapezoid integral of the density: an independent oracle for the
// map value, since the map is the CDF of its density.
double cdf_by_quadrature(const Map1D& map, double t, int intervals) {
  double sum = 0.5 * (map.deriv(0.0) + map.deriv(t));
  for (int j = 1; j < intervals; ++j) sum += map.deriv(t * j / intervals);
  return sum * t / intervals;
}

}  // namespace

// ============================================================================
// 1D maps
// ============================================================================

TEST_CASE("map endpoints are pinned exactly") {
  for (const Map1D& map : {fixture_a(), fixture_b(), sample_map_1d(7), Map1D()}) {
    CHECK(map(0.0) == 0.0);
    CHECK(map(1.0) == 1.0);
  }
}

TEST_CASE("map values match frozen constants and quadrature of the density") {
  const Map1D a = fixture_a();
  CHECK(a(0.25) == doctest::Approx(0.32957747154594766788).epsilon(1e-15));
  CHECK(a.deriv(0.25) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.deriv2(0.25) == doctest::Approx(-kPi).epsilon(1e-15));

  const Map1D b = fixture_b();
  CHECK(b(0.37) == doctest::Approx(0.47733288581288452662).epsilon(1e-15));
  CHECK(b.deriv(0.37) == doctest::Approx(1.0399308961084081547).epsilon(1e-15));
  CHECK(b.deriv2(0.37) == doctest::Approx(-3.3954784967916717066).epsilon(1e-14));

  CHECK(b(0.37) == doctest::Approx(cdf_by_quadrature(b, 0.37, 200000)).epsilon(1e-10));
  CHECK(a(0.25) == doctest::Approx(cdf_by_quadrature(a, 0.25, 200000)).epsilon(1e-10));
}

TEST_CASE("map derivatives agree with finite differences") {
  const Map1D b = fixture_b();
  const double h = 1e-6;
  for (double t : {0.1, 0.33, 0.5, 0.91}) {
    const double fd1 = (b(t + h) - b(t - h)) / (2 * h);
    const double fd2 = (b.deriv(t + h) - b.deriv(t - h)) / (2 * h);
    CHECK(b.deriv(t) == doctest::Approx(fd1).epsilon(1e-9));
    CHECK(b.deriv2(t) == doctest::Approx(fd2).epsilon(1e-7));
  }
  const MapJet1D jet = b.jet(0.37);
  CHECK(jet.x == b(0.37));
  CHECK(jet.dx == b.deriv(0.37));
  CHECK(jet.d2x == b.deriv2(0.37));
}

TEST_CASE("amplitude/phase densities match direct evaluation") {
  const VectorXd amp = vec({0.8, -0.5, 0.3});
  const VectorXd phase = vec({0.2, 1.1, -0.7});
  const double beta = 1.0;
  const TrigDensityParams p = trig_density_from_phases(amp, phase, beta);
  const Map1D map((p));

  for (double t : {0.0, 0.21, 0.5, 0.77, 1.0}) {
    double direct = 0.0;
    for (int k = 1; k <= 3; ++k)
      direct += amp[k - 1] * std::cos(2 * kPi * k * t + phase[k - 1]);
    CHECK(map.deriv(t) ==
          doctest::Approx(1.0 + direct / p.normalization).epsilon(1e-13));
  }
  // Safe normalization keeps the density positive no matter the draw.
  CHECK(p.normalization == doctest::Approx(p.safe_normalization()));
}

TEST_CASE("construction rejects invalid densities") {
  CHECK_THROWS_AS((void)trig_density(vec({1.0}), vec({0.0}), 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)trig_density(vec({1.0}), vec({0.0, 0.0}), 1.0),
                  std::invalid_argument);
  // Fixed normalization far below the safe one: density dips negative.
  CHECK_THROWS_AS(Map1D(trig_density_fixed(vec({1.0}), vec({0.0}), 1e-5, 0.5)),
                  std::domain_error);
  // The same coefficients are fine with the safe normalization.
  CHECK_NOTHROW(Map1D(trig_density(vec({1.0}), vec({0.0}), 1e-5)));
}

TEST_CASE("sampled 1D maps are reproducible and strictly monotone") {
  const Map1D m1 = sample_map_1d(99), m2 = sample_map_1d(99), m3 = sample_map_1d(100);
  CHECK(m1.params().cos_coeffs == m2.params().cos_coeffs);
  CHECK(m1.params().sin_coeffs == m2.params().sin_coeffs);
  CHECK(m1.params().cos_coeffs != m3.params().cos_coeffs);

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Map1D m = sample_map_1d(seed);
    double lo = 1.0;
    for (int j = 0; j <= 500; ++j) lo = std::min(lo, m.deriv(j / 500.0));
    CHECK(lo > 0.0);
  }
}

// ============================================================================
// 2D maps
// ============================================================================

TEST_CASE("2D identity map and boundary pinning") {
  const Map2D identity;
  CHECK(identity.is_identity());
  // The transfinite blend u(1-v) + uv rounds in the last ulp, so interior
  // points reproduce to machine precision rather than bitwise.
  const Vector2d p(0.3, 0.8);
  CHECK((identity(p) - p).cwiseAbs().maxCoeff() < 1e-15);

  const Map2D map = sample_map_2d(5);
  CHECK_FALSE(map.is_identity());
  for (double t : {0.0, 0.25, 0.6, 1.0}) {
    CHECK(map(Vector2d(t, 0.0))[1] == 0.0);  // bottom edge stays on x2 = 0
    CHECK(map(Vector2d(t, 1.0))[1] == 1.0);
    CHECK(map(Vector2d(0.0, t))[0] == 0.0);
    CHECK(map(Vector2d(1.0, t))[0] == 1.0);
  }
  // Corners are fixed points.
  for (double u : {0.0, 1.0})
    for (double v : {0.0, 1.0}) CHECK(map(Vector2d(u, v)) == Vector2d(u, v));
}

TEST_CASE("1D jacobi jet matches hand values") {
  const JacobiJet<1> jet = jacobi_jet(fixture_a(), 0.25);
  CHECK(jet.x[0] == doctest::Approx(0.32957747154594766788).epsilon(1e-15));
  CHECK(jet.det == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jet.inv_jac(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jet.det_grad[0] == doctest::Approx(-kPi).epsilon(1e-14));
  // d2xi = -(dxi/dx)^3 d2x/dxi2 = pi at this point
  CHECK(jet.d2xi[0](0, 0) == doctest::Approx(kPi).epsilon(1e-14));
}

TEST_CASE("2D jacobi jet matches hand values on a one-curved-edge map") {
  // Bottom edge curved (fixture A), remaining edges identity:
  //   x1(u,v) = yA(u)(1-v) + u v,  x2(u,v) = v.
  const Map2D map(fixture_a(), Map1D(), Map1D(), Map1D());
  const JacobiJet<2> jet = jacobi_jet(map, Vector2d(0.25, 0.5));

  CHECK(jet.x[0] == doctest::Approx(0.28978873577297383394).epsilon(1e-15));
  CHECK(jet.x[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(jet.jac(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jet.jac(0, 1) == doctest::Approx(0.25 - 0.32957747154594766788).epsilon(1e-14));
  CHECK(jet.jac(1, 0) == 0.0);
  CHECK(jet.jac(1, 1) == 1.0);
  CHECK(jet.det == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jet.det_grad[0] == doctest::Approx(-kPi / 2).epsilon(1e-14));
  CHECK(jet.det_grad[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(jet.d2xi[0](0, 0) == doctest::Approx(kPi / 2).epsilon(1e-14));
}

TEST_CASE("jacobian calculus identities hold against finite differences") {
  RandomStream rs(31);
  const Map2D map = sample_map_2d(31);
  Eigen::Matrix2Xd points(2, 25);
  for (int c = 0; c < points.cols(); ++c)
    points.col(c) = Vector2d(0.05 + 0.9 * rs.uniform(), 0.05 + 0.9 * rs.uniform());

  const CalculusReport report = check_calculus_identities(map, points);
  CHECK(report.max_inverse_error < 1e-12);
  CHECK(report.max_det_grad_error < 1e-5);
  CHECK(report.max_d2xi_error < 1e-5);
  CHECK(report.max_divergence_error < 1e-5);
  CHECK(report.within(1e-5));
}

TEST_CASE("sampled 2D maps have positive jacobians on a fine grid") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Map2D map = sample_map_2d(seed);
    double lo = 1.0;
    for (int i = 0; i <= 50; ++i)
      for (int j = 0; j <= 50; ++j)
        lo = std::min(lo, jacobi_jet(map, Vector2d(i / 50.0, j / 50.0)).det);
    CHECK(lo > 0.0);
  }
}

TEST_CASE("grid distortion") {
  CHECK(grid_distortion(Map1D(), 101) == 0.0);
  CHECK(grid_distortion(Map2D(), 33) == 0.0);
  // Fixture A: max |y - t| = 1/(4 pi), attained at t = 1/4 (a grid node).
  CHECK(grid_distortion(fixture_a(), 101) ==
        doctest::Approx(1.0 / (4 * kPi)).epsilon(1e-14));
}
