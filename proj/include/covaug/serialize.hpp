#pragma once

#include "covaug/maps.hpp"

#include <json.hpp>

namespace covaug {

/// JSON round-trip for map parameters, so a dataset manifest can record the
/// exact transformation applied to each sample.

nlohmann::json to_json(const TrigDensityParams& params);
TrigDensityParams trig_density_params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Map1D& map);
Map1D map1d_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Map2D& map);
Map2D map2d_from_json(const nlohmann::json& j);

}  // namespace covaug
