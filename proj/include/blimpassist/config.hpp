#pragma once

// JSON (de)serialization of parameters, layouts, controller settings and
// scenarios. Every object rejects unknown keys; omitted keys keep defaults.

#include <filesystem>

#include <nlohmann/json.hpp>

#include "blimpassist/harness.hpp"

namespace blimpassist {

using json = nlohmann::json;

json to_json(const BlimpParams& p);
json to_json(const ThrusterLayout& layout);
json to_json(const ControllerConfig& cfg);
json to_json(const BlimpState& s);
json to_json(const PilotSpec& spec);
json to_json(const Scenario& sc);
json to_json(const MetricsReport& m);
json to_json(const ComparisonReport& r);

// Parsers throw InvalidScenario with a dotted field path.
BlimpParams params_from_json(const json& j, const BlimpParams& base = {});
ThrusterLayout layout_from_json(const json& j, const ThrusterLayout& base);
ControllerConfig controller_from_json(const json& j, const ControllerConfig& base = {});
BlimpState state_from_json(const json& j, const BlimpState& base = {});
/// Relative replay-log paths resolve against `base_dir`.
PilotSpec pilot_from_json(const json& j, const std::filesystem::path& base_dir);
Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir = {});
MetricsReport metrics_from_json(const json& j);

/// Reads and validates a scenario file. Throws Io or InvalidScenario.
Scenario load_scenario(const std::filesystem::path& path, bool allow_interactive = false);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);

/// Parameter file: a flat object keyed by field name.
BlimpParams load_params(const std::filesystem::path& path);

}  // namespace blimpassist
