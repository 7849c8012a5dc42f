#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pauliblock/quadrature.hpp"
#include "pauliblock/types.hpp"
#include "simulate/units.hpp"

namespace simulate {

// Grid for a one-parameter scan. Expansion is finite and monotone by
// construction; list grids must come in strictly monotone already.
struct GridSpec {
  enum class Type { linspace, logspace, list };
  Type type = Type::linspace;
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  std::vector<double> values;

  std::vector<double> expand() const;
};

struct ScanSpec {
  std::string parameter;
  GridSpec grid;
};

struct OutputSpec {
  enum class Format { csv, json };
  Format format = Format::csv;
  std::string path;  // file stem, no extension; defaults to the scenario name
};

// Optional overrides for the numerical controls; everything has a default.
struct NumericsSpec {
  pauliblock::QuadratureOptions quadrature;
  double evolve_rel_tol = 1e-9;
  double evolve_abs_tol = 1e-12;

  nlohmann::json echo() const;
};

// ---- typed per-scenario parameters, all in canonical units ----

struct RatesParams {
  pauliblock::Vec3 eta{0.0, 0.0, 0.0};
  bool eta_scalar = false;  // scalar input puts all motion on the x axis
  pauliblock::Vec3 dipole{0.0, 0.0, 1.0};
  double gamma = 1.0;  // rad/s
  pauliblock::Mode3 blocking_mode{0, 0, 0};
  bool blocked = true;
  std::optional<pauliblock::Vec3> laser_khat;  // recoil-displaced initial state
};

struct ZeemanParams {
  bool x_mode = true;
  double x = 0.0;
  double b_tesla = 0.0;
  double a_hfs_hz = -1.0;
  double g_j = 0.0;
  double g_i = 0.0;
  std::string species;  // label only, echoed in the manifest
};

struct EvolveParams {
  pauliblock::Vec3 eta{0.0, 0.0, 0.0};
  pauliblock::Vec3 nu_over_gamma{1.0, 1.0, 1.0};
  pauliblock::Vec3 dipole{0.0, 0.0, 1.0};
  double gamma = 1.0;  // rad/s
  pauliblock::Mode3 n_max{0, 0, 0};
  std::set<int> sectors{0, 1};
  bool dd_include = false;
  double dd_cutoff = 0.01;
  std::string initial = "blocked_pair";  // or "single_excited"
  pauliblock::Mode3 blocking_mode{0, 0, 0};
  std::vector<double> times_gamma;  // units of 1/gamma, ascending from 0
};

struct PhotonParams {
  double eta = 0.0;
  double nu_over_gamma = 0.0;
  double gamma = 1.0;  // rad/s
  std::complex<double> mu0{1.0, 0.0};
  std::complex<double> mu1{0.0, 0.0};
  double t_gamma = 0.0;  // detection time, units of 1/gamma
  int n_samples = 4001;
};

struct DipoleDipoleParams {
  pauliblock::Vec3 eta{0.0, 0.0, 0.0};
  bool eta_scalar = false;  // scalar input means isotropic here
  pauliblock::Vec3 dipole{0.0, 0.0, 1.0};
  double gamma = 1.0;  // rad/s
  pauliblock::Mode3 bra_e{0, 0, 0};
  pauliblock::Mode3 bra_g{0, 0, 0};
  pauliblock::Mode3 ket_g{0, 0, 0};
  pauliblock::Mode3 ket_e{0, 0, 0};
  double cutoff = 0.01;
};

struct QuenchParams {
  double omega_dr = 0.0;  // rad/s
  double delta_dr = 0.0;  // rad/s
  double gamma_1p = 0.0;  // rad/s
  double eta = 0.0;
  double eta_dr = 0.0;
  double c_up_sq = 1.0;
  std::vector<double> times_s;  // optional population table
};

using ScenarioParams = std::variant<RatesParams, ZeemanParams, EvolveParams, PhotonParams,
                                    DipoleDipoleParams, QuenchParams>;

struct ScenarioConfig {
  int schema = 0;
  std::string scenario;
  nlohmann::json parameters;  // raw tree, kept for scan substitution
  ScenarioParams params;      // validated form of `parameters`
  OutputSpec output;
  std::optional<ScanSpec> scan;
  NumericsSpec numerics;
  std::uint64_t config_hash = 0;
  std::string base_dir;  // anchor for relative paths inside the config
};

// Parses and validates the whole config. All problems are collected into
// errs; the returned config is only meaningful when errs.ok(). base_dir
// anchors relative paths referenced from the config (constants_file).
ScenarioConfig parse_config(const std::string& text, ErrorList& errs,
                            const std::string& base_dir = "");

// Re-extracts typed parameters with the scanned key replaced by value.
// parse_config has already validated the base tree, so errors here are
// grid-point domain problems (reported with the point index by the caller).
ScenarioParams substitute_scan_value(const ScenarioConfig& cfg, double value,
                                     ErrorList& errs);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex16(std::uint64_t h);

}  // namespace simulate
