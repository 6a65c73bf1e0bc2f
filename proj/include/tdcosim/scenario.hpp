#pragma once

#include "tdcosim/cosim.hpp"

#include <json.hpp>

#include <filesystem>

namespace tdcosim {

/// The 60 s reference case: three machines, a three-phase fault at 20 s
/// cleared after 80 ms, and a 40 MW trip at 40 s. Two DPV plants with a
/// combined 1.25 MW capacity and 200 kW reserve sit on the feeder.
ScenarioConfig standard_scenario(bool agc = false);

/// Throws Errc::config on malformed or inconsistent documents.
ScenarioConfig scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Throws Errc::io when the file cannot be read.
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path);

} // namespace tdcosim
