#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "continuum/scenario_io.hpp"

namespace continuum::test {

inline std::string preset_path(const std::string& stem) {
  return std::string(CONTINUUM_TEST_SCENARIO_DIR) + "/" + stem + ".json";
}

inline nlohmann::json preset_document(const std::string& stem) {
  std::ifstream in(preset_path(stem));
  return nlohmann::json::parse(in);
}

inline ScenarioConfig preset(const std::string& stem) { return load_scenario(preset_path(stem)); }

inline ScenarioConfig drone() { return preset("drone_fleet"); }
inline ScenarioConfig sensor() { return preset("sensor_network"); }
inline ScenarioConfig safety() { return preset("worker_safety"); }

}  // namespace continuum::test
