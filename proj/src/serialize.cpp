#include "covaug/serialize.hpp"

#include <vector>

namespace covaug {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd from_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

nlohmann::json to_json(const TrigDensityParams& params) {
  return {{"cos_coeffs", to_vector(params.cos_coeffs)},
          {"sin_coeffs", to_vector(params.sin_coeffs)},
          {"beta", params.beta},
          {"normalization", params.normalization}};
}

TrigDensityParams trig_density_params_from_json(const nlohmann::json& j) {
  return trig_density_fixed(from_vector(j.at("cos_coeffs").get<std::vector<double>>()),
                            from_vector(j.at("sin_coeffs").get<std::vector<double>>()),
                            j.at("beta").get<double>(),
                            j.at("normalization").get<double>());
}

nlohmann::json to_json(const Map1D& map) {
  if (map.is_identity()) return {{"identity", true}};
  return {{"identity", false}, {"density", to_json(map.params())}};
}

Map1D map1d_from_json(const nlohmann::json& j) {
  if (j.at("identity").get<bool>()) return Map1D();
  return Map1D(trig_density_params_from_json(j.at("density")));
}

nlohmann::json to_json(const Map2D& map) {
  return {{"bottom", to_json(map.bottom())},
          {"top", to_json(map.top())},
          {"left", to_json(map.left())},
          {"right", to_json(map.right())}};
}

Map2D map2d_from_json(const nlohmann::json& j) {
  return Map2D(map1d_from_json(j.at("bottom")), map1d_from_json(j.at("top")),
               map1d_from_json(j.at("left")), map1d_from_json(j.at("right")));
}

}  // namespace covaug
