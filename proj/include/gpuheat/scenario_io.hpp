#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include <json.hpp>

#include "gpuheat/simulator.hpp"

namespace gpuheat::io {

/// Parses a scenario document (JSON). Unknown keys, wrong types and
/// out-of-range values are all reported together in one ValidationError.
/// Temperatures in the file are Celsius.
sim::Scenario parse_scenario(const nlohmann::json& doc);
sim::Scenario parse_scenario(std::istream& in);
sim::Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const sim::Scenario& scenario);

/// One key per Summary field.
nlohmann::json summary_to_json(const sim::Summary& summary);

nlohmann::json comparison_to_json(const sim::Comparison& comparison);

}  // namespace gpuheat::io
