#pragma once

#include <filesystem>

#include <json.hpp>

#include "continuum/model.hpp"

namespace continuum {

// Builds a ScenarioConfig from a parsed scenario document and checks every
// invariant. Throws ConfigError naming the offending key path.
ScenarioConfig validate_scenario(const nlohmann::json& raw_config);

// Inverse of validate_scenario for a validated config; device groups come back
// expanded (one entry per device, no "count").
nlohmann::json serialize_scenario(const ScenarioConfig& config);

ScenarioConfig load_scenario(const std::filesystem::path& path);

// Outage schedule files: either a bare array of windows or {"outage_windows": [...]}.
std::vector<OutageWindow> parse_outage_windows(const nlohmann::json& doc, double duration_s);

}  // namespace continuum
