#include "simulate/output.hpp"

#include <charconv>
#include <cmath>

#include "pauliblock/version.hpp"

namespace simulate {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string render_csv(const Table& table, const std::string& scenario,
                       const std::string& config_hash) {
  std::string out;
  out += "# pauliblock ";
  out += pauliblock::version_string;
  out += " scenario=" + scenario + " config=" + config_hash + "\n";
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json render_json(const Table& table, const std::string& scenario,
                           const std::string& config_hash) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : row) {
      // JSON has no literals for these; the CSV strings are used instead
      if (std::isnan(v))
        r.push_back("nan");
      else if (std::isinf(v))
        r.push_back(v > 0 ? "inf" : "-inf");
      else
        r.push_back(v);
    }
    rows.push_back(std::move(r));
  }
  return nlohmann::json{{"tool", "pauliblock"},
                        {"version", pauliblock::version_string},
                        {"scenario", scenario},
                        {"config", config_hash},
                        {"columns", table.columns},
                        {"rows", std::move(rows)}};
}

nlohmann::json build_manifest(const ScenarioConfig& cfg, const RunResult& result,
                              const std::vector<std::string>& output_files,
                              double wall_time_s) {
  nlohmann::json modules = nlohmann::json::object();
  for (const char* m :
       {"recoil", "rates", "zeeman", "master_eq", "dipole_dipole", "photon", "cli"})
    modules[m] = pauliblock::version_string;
  nlohmann::json scan = nullptr;
  if (cfg.scan) {
    scan = nlohmann::json{{"parameter", cfg.scan->parameter}};
    auto points = cfg.scan->grid.expand();
    scan["points"] = points.size();
    scan["first"] = points.front();
    scan["last"] = points.back();
  }
  return nlohmann::json{{"schema", 1},
                        {"tool", {{"name", "pauliblock-simulate"},
                                  {"version", pauliblock::version_string}}},
                        {"modules", std::move(modules)},
                        {"scenario", cfg.scenario},
                        {"config_hash", "fnv1a64:" + hex16(cfg.config_hash)},
                        {"inputs", result.inputs},
                        {"numerics", result.numerics},
                        {"scan", std::move(scan)},
                        {"outputs", output_files},
                        {"warnings", result.warnings},
                        {"wall_time_s", wall_time_s}};
}

}  // namespace simulate
