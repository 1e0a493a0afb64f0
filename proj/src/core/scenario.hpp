#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace erc {

// A finished scenario run: the JSON report plus any CSV tables the scenario
// emits. Reports embed the exact config and seed; with wall_time_ms removed
// they are byte-reproducible for a given build.
struct RunReport {
  nlohmann::json report;
  std::vector<std::pair<std::string, std::string>> csv_tables;  // (name, csv text)
};

// Parses, validates (strict keys), dispatches, and checks result invariants.
// Throws erc::Error subtypes; never leaves partial output behind.
RunReport run_scenario(const std::string& config_json_text);

const std::vector<std::string>& preset_names();
std::string preset_config_text(const std::string& name);

// Deterministic float formatting shared by every CSV writer.
std::string format_double(double v);

}  // namespace erc
