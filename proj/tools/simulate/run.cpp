#include "simulate/run.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "simulate/config.hpp"
#include "simulate/output.hpp"
#include "simulate/scenarios.hpp"

namespace simulate {

namespace {

bool write_file(const std::filesystem::path& path, const std::string& content,
                std::ostream& err) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    err << "error: cannot write " << path.string() << "\n";
    return false;
  }
  return true;
}

}  // namespace

int run_simulation(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  std::ifstream in(opts.config_path);
  if (!in) {
    err << "error: cannot open config " << opts.config_path << "\n";
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();

  ErrorList errs;
  std::string base_dir =
      std::filesystem::path(opts.config_path).parent_path().string();
  ScenarioConfig cfg = parse_config(text, errs, base_dir);
  if (!errs.ok()) {
    for (const auto& e : errs.errors) err << "config error: " << e << "\n";
    err << "error: " << errs.errors.size() << " config problem(s), nothing run\n";
    return 2;
  }

  std::string out_dir = opts.out_dir;
  if (out_dir.empty()) {
    const char* env = std::getenv("PAULIBLOCK_OUTDIR");
    out_dir = env && *env ? env : ".";
  }
  std::error_code fs_err;
  std::filesystem::create_directories(out_dir, fs_err);
  if (fs_err) {
    err << "error: cannot create output directory " << out_dir << ": "
        << fs_err.message() << "\n";
    return 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  try {
    result = run_scenario(cfg, std::max(1, opts.parallel));
  } catch (const std::exception& e) {
    err << "error: scenario " << cfg.scenario << ": " << e.what() << "\n";
    return 2;
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::string hash = "fnv1a64:" + hex16(cfg.config_hash);
  std::string payload_name =
      cfg.output.path +
      (cfg.output.format == OutputSpec::Format::csv ? ".csv" : ".json");
  std::filesystem::path payload_path = std::filesystem::path(out_dir) / payload_name;
  std::filesystem::create_directories(payload_path.parent_path(), fs_err);

  std::string payload = cfg.output.format == OutputSpec::Format::csv
                            ? render_csv(result.table, cfg.scenario, hash)
                            : render_json(result.table, cfg.scenario, hash).dump(2) + "\n";
  if (!write_file(payload_path, payload, err)) return 2;

  auto manifest = build_manifest(cfg, result, {payload_name}, wall);
  std::filesystem::path manifest_path =
      std::filesystem::path(out_dir) / (cfg.output.path + ".manifest.json");
  if (!write_file(manifest_path, manifest.dump(2) + "\n", err)) return 2;

  if (opts.verbose) {
    err << "config " << hash << "\n";
    err << "wrote " << payload_path.string() << " (" << result.table.rows.size()
        << " rows)\n";
    err << "wrote " << manifest_path.string() << "\n";
    err << "wall time " << wall << " s\n";
  }
  for (const auto& line : result.summary) out << line << "\n";
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  return result.warnings.empty() ? 0 : 1;
}

}  // namespace simulate
