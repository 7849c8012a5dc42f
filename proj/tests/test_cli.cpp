#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "simulate/config.hpp"
#include "simulate/output.hpp"
#include "simulate/run.hpp"
#include "simulate/units.hpp"

using namespace simulate;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path = fs::temp_directory_path() / ("pbcli_" + std::to_string(rng()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& text) const {
    fs::path p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct RunCapture {
  int exit = -1;
  std::string out;
  std::string err;
};

RunCapture run(const std::string& config, const std::string& outdir, int parallel = 1) {
  RunOptions opts;
  opts.config_path = config;
  opts.out_dir = outdir;
  opts.parallel = parallel;
  std::ostringstream out, err;
  RunCapture cap;
  cap.exit = run_simulation(opts, out, err);
  cap.out = out.str();
  cap.err = err.str();
  return cap;
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

double csv_field(const std::string& line, int index) {
  std::stringstream ss(line);
  std::string field;
  for (int i = 0; i <= index; ++i) std::getline(ss, field, ',');
  return std::stod(field);
}

const char* kQuenchConfig = R"({
  "schema": 1,
  "scenario": "quench",
  "parameters": {
    "omega_dr": "4e6 rad/s",
    "delta_dr": "290 MHz",
    "gamma_1p": "29 MHz",
    "eta": 0.28,
    "eta_dr": 0.19
  }
})";

}  // namespace

TEST_CASE("unit parsing: suffixes and canonical factors") {
  ErrorList errs;
  auto q = parse_quantity(nlohmann::json("29 MHz"), Dim::frequency, "k", errs);
  REQUIRE(q.has_value());
  CHECK(q->value == doctest::Approx(2.0 * M_PI * 29e6).epsilon(1e-15));
  CHECK_FALSE(q->gamma_relative);

  q = parse_quantity(nlohmann::json("1.5 rad/s"), Dim::frequency, "k", errs);
  CHECK(q->value == 1.5);

  q = parse_quantity(nlohmann::json("100 Gamma"), Dim::frequency, "k", errs);
  CHECK(q->value == 100.0);
  CHECK(q->gamma_relative);

  q = parse_quantity(nlohmann::json("0.05 T"), Dim::field, "k", errs);
  CHECK(q->value == 0.05);
  q = parse_quantity(nlohmann::json("500 G"), Dim::field, "k", errs);
  CHECK(q->value == doctest::Approx(0.05).epsilon(1e-15));

  q = parse_quantity(nlohmann::json("2 ms"), Dim::time, "k", errs);
  CHECK(q->value == doctest::Approx(2e-3).epsilon(1e-15));
  q = parse_quantity(nlohmann::json("12 /Gamma"), Dim::time, "k", errs);
  CHECK(q->value == 12.0);
  CHECK(q->gamma_relative);
  CHECK(errs.ok());

  auto obj = nlohmann::json{{"value", 4e6}, {"unit", "rad/s"}};
  q = parse_quantity(obj, Dim::frequency, "k", errs);
  CHECK(q->value == 4e6);
  CHECK(errs.ok());
}

TEST_CASE("unit parsing: bare numbers and unknown units are rejected") {
  ErrorList errs;
  auto q = parse_quantity(nlohmann::json(4.0), Dim::frequency, "omega", errs);
  CHECK_FALSE(q.has_value());
  REQUIRE(errs.errors.size() == 1);
  CHECK(errs.errors[0].find("missing unit") != std::string::npos);

  errs = {};
  q = parse_quantity(nlohmann::json("3 furlong"), Dim::field, "b", errs);
  CHECK_FALSE(q.has_value());
  CHECK(errs.errors[0].find("unknown unit") != std::string::npos);
}

TEST_CASE("minimal rates config parses and matches the module value") {
  ErrorList errs;
  auto cfg = parse_config(R"({"schema": 1, "scenario": "rates",
                              "parameters": {"eta": 0.28, "orientation": "perp"}})",
                          errs);
  REQUIRE(errs.ok());
  CHECK(cfg.scenario == "rates");
  const auto& p = std::get<RatesParams>(cfg.params);
  CHECK(p.eta[0] == 0.28);
  CHECK(p.eta[1] == 0.0);
  CHECK(p.dipole[2] == 1.0);

  TempDir tmp;
  auto cap = run(tmp.file("r.json", R"({"schema": 1, "scenario": "rates",
                  "parameters": {"eta": 0.28, "orientation": "perp"}})"),
                 tmp.sub("out"));
  CHECK(cap.exit == 0);
  auto lines = csv_lines(slurp(tmp.sub("out") + "/rates.csv"));
  REQUIRE(lines.size() == 3);
  // single tight axis, dipole perpendicular: the exact blocked rate
  CHECK(csv_field(lines[2], 3) == doctest::Approx(0.030584790666088945).epsilon(1e-9));
  CHECK(csv_field(lines[2], 4) == doctest::Approx(0.4 * 0.28 * 0.28).epsilon(1e-12));
}

TEST_CASE("config errors are all collected, not first-only") {
  ErrorList errs;
  parse_config(R"({
    "schema": 1,
    "scenario": "quench",
    "parameters": {
      "omega_dr": 4,
      "delta_dr": "290 parsec",
      "gamma_1p": "29 MHz",
      "c_up_sq": 1.7,
      "banana": true
    },
    "extra_top": 1
  })",
               errs);
  REQUIRE(errs.errors.size() == 5);
  auto joined = [&] {
    std::string all;
    for (const auto& e : errs.errors) all += e + "\n";
    return all;
  }();
  CHECK(joined.find("unknown key \"extra_top\"") != std::string::npos);
  CHECK(joined.find("unknown key \"banana\"") != std::string::npos);
  CHECK(joined.find("omega_dr: missing unit") != std::string::npos);
  CHECK(joined.find("unknown unit \"parsec\"") != std::string::npos);
  CHECK(joined.find("c_up_sq: must lie in [0, 1]") != std::string::npos);
}

TEST_CASE("schema version is required and checked") {
  ErrorList errs;
  parse_config(R"({"scenario": "rates", "parameters": {"eta": 0.1}})", errs);
  bool mentions_schema = false;
  for (const auto& e : errs.errors)
    mentions_schema = mentions_schema || e.find("schema") != std::string::npos;
  CHECK(mentions_schema);

  errs = {};
  parse_config(R"({"schema": 2, "scenario": "rates", "parameters": {"eta": 0.1}})", errs);
  CHECK_FALSE(errs.ok());

  errs = {};
  parse_config(R"({"schema": 1, "scenario": "warp", "parameters": {}})", errs);
  bool mentions_scenario = false;
  for (const auto& e : errs.errors)
    mentions_scenario = mentions_scenario || e.find("unknown scenario") != std::string::npos;
  CHECK(mentions_scenario);
}

TEST_CASE("zeeman logspace scan expands to the full grid") {
  TempDir tmp;
  auto cap = run(tmp.file("z.json", R"({
    "schema": 1,
    "scenario": "zeeman",
    "parameters": {"x": 1.0},
    "scan": {"parameter": "x",
             "grid": {"type": "logspace", "start": 1e-2, "stop": 1e2, "count": 200}}
  })"),
                 tmp.sub("out"));
  REQUIRE(cap.exit == 0);
  auto lines = csv_lines(slurp(tmp.sub("out") + "/zeeman.csv"));
  REQUIRE(lines.size() == 202);  // comment + header + 200 rows
  CHECK(csv_field(lines[2], 0) == 1e-2);    // endpoints exact
  CHECK(csv_field(lines[201], 0) == 1e2);
  // grid monotone; stretched state never flips; x -> infinity decouples spins
  double prev = 0.0;
  for (size_t i = 2; i < lines.size(); ++i) {
    double x = csv_field(lines[i], 0);
    CHECK(x > prev);
    prev = x;
    CHECK(csv_field(lines[i], 7) == 1.0);
  }
  CHECK(csv_field(lines[201], 9) > 0.999);
}

TEST_CASE("reruns produce byte-identical payloads") {
  TempDir tmp;
  auto config = tmp.file("q.json", kQuenchConfig);
  auto a = run(config, tmp.sub("a"));
  auto b = run(config, tmp.sub("b"));
  REQUIRE(a.exit == 0);
  REQUIRE(b.exit == 0);
  CHECK(slurp(tmp.sub("a") + "/quench.csv") == slurp(tmp.sub("b") + "/quench.csv"));

  // manifests agree on everything except the wall clock
  auto ma = nlohmann::json::parse(slurp(tmp.sub("a") + "/quench.manifest.json"));
  auto mb = nlohmann::json::parse(slurp(tmp.sub("b") + "/quench.manifest.json"));
  ma.erase("wall_time_s");
  mb.erase("wall_time_s");
  CHECK(ma == mb);
  CHECK(ma["config_hash"] == mb["config_hash"]);
  CHECK(ma["inputs"]["gamma_1p_rad_s"] == doctest::Approx(2.0 * M_PI * 29e6));
}

TEST_CASE("parallel scans merge into the serial byte stream") {
  TempDir tmp;
  auto config = tmp.file("scan.json", R"({
    "schema": 1,
    "scenario": "rates",
    "parameters": {"eta": 0.1, "orientation": "perp"},
    "scan": {"parameter": "eta",
             "grid": {"type": "linspace", "start": 0.05, "stop": 0.4, "count": 8}}
  })");
  auto serial = run(config, tmp.sub("s"), 1);
  auto parallel = run(config, tmp.sub("p"), 4);
  REQUIRE(serial.exit == 0);
  REQUIRE(parallel.exit == 0);
  CHECK(slurp(tmp.sub("s") + "/rates.csv") == slurp(tmp.sub("p") + "/rates.csv"));
}

TEST_CASE("quench summary reports the dressed rate on stdout") {
  TempDir tmp;
  auto cap = run(tmp.file("q.json", kQuenchConfig), tmp.sub("out"));
  REQUIRE(cap.exit == 0);
  CHECK(cap.out.find("effective quench rate = 219.5") != std::string::npos);
  CHECK(cap.out.find("s^-1") != std::string::npos);
}

TEST_CASE("exit codes: ok, warning, error") {
  TempDir tmp;
  CHECK(run(tmp.file("ok.json", kQuenchConfig), tmp.sub("o1")).exit == 0);

  // unresolved sidebands: the photon model warns and exits 1
  auto warn = run(tmp.file("warn.json", R"({
    "schema": 1,
    "scenario": "photon",
    "parameters": {"eta": 0.28, "nu": "0.5 Gamma", "mu0": 1.0, "mu1": 0.0,
                   "t": "400 /Gamma", "n_samples": 801}
  })"),
                  tmp.sub("o2"));
  CHECK(warn.exit == 1);
  CHECK(warn.err.find("warning:") != std::string::npos);

  // adiabatic elimination marginal: small detuning warns
  auto adiab = run(tmp.file("ad.json", R"({
    "schema": 1,
    "scenario": "quench",
    "parameters": {"omega_dr": "4e6 rad/s", "delta_dr": "30 MHz", "gamma_1p": "29 MHz"}
  })"),
                   tmp.sub("o3"));
  CHECK(adiab.exit == 1);
  CHECK(adiab.err.find("adiabatic") != std::string::npos);

  CHECK(run(tmp.file("bad.json", R"({"schema": 1})"), tmp.sub("o4")).exit == 2);
  CHECK(run(tmp.sub("missing.json"), tmp.sub("o5")).exit == 2);

  // module-level failure surfaces as exit 2 with context
  auto early = run(tmp.file("early.json", R"({
    "schema": 1,
    "scenario": "photon",
    "parameters": {"eta": 0.28, "nu": "50 Gamma", "mu0": 1.0, "mu1": 0.0,
                   "t": "5 /Gamma", "n_samples": 801}
  })"),
                   tmp.sub("o6"));
  CHECK(early.exit == 2);
  CHECK(early.err.find("error: scenario photon") != std::string::npos);
}

TEST_CASE("scan validation: domain, monotonicity, unsupported targets") {
  ErrorList errs;
  parse_config(R"({
    "schema": 1, "scenario": "rates", "parameters": {"eta": 0.1},
    "scan": {"parameter": "eta",
             "grid": {"type": "linspace", "start": -0.1, "stop": 0.1, "count": 5}}
  })",
               errs);
  bool scan_domain = false;
  for (const auto& e : errs.errors)
    scan_domain = scan_domain || e.find("scan point") != std::string::npos;
  CHECK(scan_domain);

  errs = {};
  parse_config(R"({
    "schema": 1, "scenario": "rates", "parameters": {"eta": 0.1},
    "scan": {"parameter": "eta", "grid": {"type": "list", "values": [0.1, 0.3, 0.2]}}
  })",
               errs);
  bool monotone = false;
  for (const auto& e : errs.errors)
    monotone = monotone || e.find("monotone") != std::string::npos;
  CHECK(monotone);

  errs = {};
  parse_config(R"({
    "schema": 1, "scenario": "photon",
    "parameters": {"eta": 0.28, "nu": "50 Gamma", "mu0": 1.0, "mu1": 0.0,
                   "t": "400 /Gamma"},
    "scan": {"parameter": "eta", "grid": {"type": "list", "values": [0.1, 0.2]}}
  })",
               errs);
  bool not_scannable = false;
  for (const auto& e : errs.errors)
    not_scannable = not_scannable || e.find("not scannable") != std::string::npos;
  CHECK(not_scannable);
}

TEST_CASE("json output format round-trips") {
  TempDir tmp;
  auto cap = run(tmp.file("j.json", R"({
    "schema": 1,
    "scenario": "zeeman",
    "parameters": {"x": 2.3},
    "output": {"format": "json", "path": "zee"}
  })"),
                 tmp.sub("out"));
  REQUIRE(cap.exit == 0);
  auto doc = nlohmann::json::parse(slurp(tmp.sub("out") + "/zee.json"));
  CHECK(doc["scenario"] == "zeeman");
  REQUIRE(doc["rows"].size() == 1);
  CHECK(doc["columns"].size() == doc["rows"][0].size());
  // x = 2.3 sits just past the 95% crossing of the worst branch
  double noflip = doc["rows"][0][doc["columns"].size() - 1].get<double>();
  CHECK(noflip > 0.95);
  CHECK(noflip < 0.96);
}

TEST_CASE("evolve scenario: trace preserved, excited population decays") {
  TempDir tmp;
  auto cap = run(tmp.file("e.json", R"({
    "schema": 1,
    "scenario": "evolve",
    "parameters": {
      "eta": 0.1, "nu": "100 Gamma", "orientation": "perp", "n_max": 3,
      "sectors": [0, 1],
      "times": {"start": "0 /Gamma", "stop": "5 /Gamma", "count": 6}
    }
  })"),
                 tmp.sub("out"));
  REQUIRE(cap.exit == 0);
  auto lines = csv_lines(slurp(tmp.sub("out") + "/evolve.csv"));
  REQUIRE(lines.size() == 8);
  CHECK(csv_field(lines[2], 2) == 1.0);  // starts fully excited
  double prev = 2.0;
  for (size_t i = 2; i < lines.size(); ++i) {
    double pe = csv_field(lines[i], 2);
    CHECK(pe < prev);
    prev = pe;
    CHECK(csv_field(lines[i], 3) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("gamma-relative units resolve against the supplied rate") {
  ErrorList errs;
  auto cfg = parse_config(R"({
    "schema": 1,
    "scenario": "photon",
    "parameters": {"eta": 0.28, "nu": "100 Gamma", "gamma": "2 rad/s",
                   "mu0": 1.0, "mu1": 0.0, "t": "400 /Gamma"}
  })",
                          errs);
  REQUIRE(errs.ok());
  const auto& p = std::get<PhotonParams>(cfg.params);
  CHECK(p.nu_over_gamma == 100.0);
  CHECK(p.t_gamma == 400.0);

  errs = {};
  cfg = parse_config(R"({
    "schema": 1,
    "scenario": "photon",
    "parameters": {"eta": 0.28, "nu": "200 rad/s", "gamma": "2 rad/s",
                   "mu0": 1.0, "mu1": 0.0, "t": "200 s"}
  })",
                     errs);
  REQUIRE(errs.ok());
  const auto& p2 = std::get<PhotonParams>(cfg.params);
  CHECK(p2.nu_over_gamma == 100.0);
  CHECK(p2.t_gamma == 400.0);
}

TEST_CASE("shortest round-trip formatting survives a parse cycle") {
  for (double v : {0.1, 1.0 / 3.0, 219.52405943709704, 1e-300, 6.022e23,
                   -0.030584790666088945}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e100) == "1e+100");
}
