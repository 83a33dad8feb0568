/// @file
/// @brief JSON round-trip of map parameters.

#include "covaug/serialize.hpp"

#include "covaug/rng.hpp"

#include <doctest.h>

using namespace covaug;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

TEST_CASE("density parameters survive a JSON round trip exactly") {
  const TrigDensityParams params =
      trig_density_fixed((VectorXd(2) << 0.3, -0.2).finished(),
                         (VectorXd(2) << 0.5, 0.1).finished(), 0.7, 1.9);
  const TrigDensityParams back = trig_density_params_from_json(to_json(params));
  CHECK(back.cos_coeffs == params.cos_coeffs);
  CHECK(back.sin_coeffs == params.sin_coeffs);
  CHECK(back.beta == params.beta);
  CHECK(back.normalization == params.normalization);
}

TEST_CASE("a sampled 1d map survives a JSON round trip bit for bit") {
  const Map1D map = sample_map_1d(20240817u);
  const Map1D back = map1d_from_json(to_json(map));
  for (double t : {0.0, 0.125, 0.5, 0.77, 1.0}) {
    CHECK(back(t) == map(t));
    CHECK(back.deriv(t) == map.deriv(t));
    CHECK(back.deriv2(t) == map.deriv2(t));
  }
}

TEST_CASE("identity maps keep their identity through JSON") {
  const Map1D id1 = map1d_from_json(to_json(Map1D()));
  CHECK(id1.is_identity());
  CHECK(id1(0.3) == 0.3);

  const Map2D id2 = map2d_from_json(to_json(Map2D()));
  CHECK(id2.is_identity());
}

TEST_CASE("a sampled 2d map survives a JSON round trip bit for bit") {
  const Map2D map = sample_map_2d(99u);
  const Map2D back = map2d_from_json(to_json(map));
  for (double u : {0.1, 0.6}) {
    for (double v : {0.25, 0.9}) {
      const Vector2d a = map(Vector2d(u, v));
      const Vector2d b = back(Vector2d(u, v));
      CHECK(a.x() == b.x());
      CHECK(a.y() == b.y());
    }
  }
}

TEST_CASE("serialized text parses back through the string form") {
  const Map1D map = sample_map_1d(7u);
  const std::string text = to_json(map).dump();
  const Map1D back = map1d_from_json(nlohmann::json::parse(text));
  CHECK(back(0.42) == map(0.42));
}

}  // namespace
