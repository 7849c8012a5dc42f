#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "simulate/config.hpp"

namespace simulate {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Shortest decimal form that round-trips to the same double. This is what
// keeps rerun payloads byte-identical.
std::string format_double(double v);

// CSV payload: one comment line identifying tool, scenario, and config
// hash, then a header row, then data. No timestamps.
std::string render_csv(const Table& table, const std::string& scenario,
                       const std::string& config_hash);

// Same content as the CSV, as a JSON document.
nlohmann::json render_json(const Table& table, const std::string& scenario,
                           const std::string& config_hash);

// Everything produced by one scenario run, ready for the writers.
struct RunResult {
  Table table;
  nlohmann::json inputs;    // canonical-unit echo of the physical inputs
  nlohmann::json numerics;  // numerical controls actually used
  std::vector<std::string> summary;   // stdout lines
  std::vector<std::string> warnings;  // nonfatal; exit code 1
};

nlohmann::json build_manifest(const ScenarioConfig& cfg, const RunResult& result,
                              const std::vector<std::string>& output_files,
                              double wall_time_s);

}  // namespace simulate
