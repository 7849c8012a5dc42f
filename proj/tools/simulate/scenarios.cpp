#include "simulate/scenarios.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "pauliblock/dipole_dipole.hpp"
#include "pauliblock/fock_basis.hpp"
#include "pauliblock/master_equation.hpp"
#include "pauliblock/photon.hpp"
#include "pauliblock/rates.hpp"
#include "pauliblock/recoil.hpp"
#include "pauliblock/zeeman.hpp"

namespace simulate {

namespace {

using nlohmann::json;
using pauliblock::LambDickeConfig;
using pauliblock::Mode3;
using pauliblock::Vec3;

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }
json mode_json(const Mode3& m) { return json::array({m[0], m[1], m[2]}); }

struct PointResult {
  std::vector<double> row;
  std::vector<std::string> warnings;
};

// Runs fn(point index) on `parallel` workers, keeping results in grid
// order. The first failing point (by index) rethrows after the join.
void run_points(size_t n_points, int parallel,
                const std::function<PointResult(size_t)>& fn,
                std::vector<PointResult>& results) {
  results.resize(n_points);
  int workers = std::max(1, std::min<int>(parallel, static_cast<int>(n_points)));
  if (workers == 1) {
    for (size_t i = 0; i < n_points; ++i) results[i] = fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n_points);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n_points) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

// ---- rates ----

PointResult rates_point(const RatesParams& p, const NumericsSpec& num) {
  LambDickeConfig cfg{p.eta, {1.0, 1.0, 1.0}, p.dipole, 1.0};
  pauliblock::rates::InitialMotionalState state;
  if (p.laser_khat)
    state = pauliblock::rates::laser_recoil(*p.laser_khat, cfg);
  else
    state = pauliblock::rates::InitialMotionalState::ground();
  state.blocking_mode = p.blocking_mode;
  state.blocking_present = p.blocked;
  double over_gamma = pauliblock::rates::gamma_eff_general(state, cfg, num.quadrature);
  auto alpha = pauliblock::recoil::alpha_coefficients(cfg.dipole_unit());
  double ld = 0.0;
  if (p.blocked) {
    for (int j = 0; j < 3; ++j) ld += alpha[j] * p.eta[j] * p.eta[j];
    if (p.laser_khat) ld *= 2.0;  // recoil displacement doubles the leading term
  } else {
    ld = 1.0;
  }
  PointResult out;
  out.row = {p.eta[0], p.eta[1], p.eta[2], over_gamma, ld, over_gamma * p.gamma};
  return out;
}

json rates_inputs(const RatesParams& p) {
  json j{{"eta", vec_json(p.eta)},
         {"dipole", vec_json(pauliblock::normalized(p.dipole))},
         {"gamma_rad_s", p.gamma},
         {"blocking_mode", mode_json(p.blocking_mode)},
         {"blocked", p.blocked}};
  j["laser_khat"] = p.laser_khat ? vec_json(*p.laser_khat) : json(nullptr);
  return j;
}

// ---- zeeman ----

PointResult zeeman_point(const ZeemanParams& p) {
  pauliblock::zeeman::HyperfineParams hp =
      p.x_mode ? pauliblock::zeeman::HyperfineParams::from_x(p.x)
               : pauliblock::zeeman::HyperfineParams::from_constants(p.a_hfs_hz, p.g_j,
                                                                     p.g_i, p.b_tesla);
  auto states = pauliblock::zeeman::eigensystem(hp);
  double x = hp.x();
  PointResult out;
  if (!p.x_mode) out.row.push_back(p.b_tesla);
  out.row.push_back(x);
  for (const auto& s : states) out.row.push_back(s.energy);
  for (double mf : {1.5, 0.5, -0.5})
    out.row.push_back(pauliblock::zeeman::no_flip_probability(mf, x));
  return out;
}

std::vector<std::string> zeeman_columns(bool x_mode) {
  std::vector<std::string> cols;
  if (!x_mode) cols.push_back("b_tesla");
  cols.push_back("x");
  const char* e = x_mode ? "e_over_abs_a" : "e_hz";
  for (const char* s :
       {"_mf_3_2", "_mf_1_2_lo", "_mf_1_2_hi", "_mf_m1_2_lo", "_mf_m1_2_hi", "_mf_m3_2"})
    cols.push_back(std::string(e) + s);
  for (const char* s : {"noflip_mf_3_2", "noflip_mf_1_2", "noflip_mf_m1_2"})
    cols.push_back(s);
  return cols;
}

json zeeman_inputs(const ZeemanParams& p) {
  if (p.x_mode) return json{{"x", p.x}};
  return json{{"b_tesla", p.b_tesla},
              {"a_hfs_hz", p.a_hfs_hz},
              {"g_j", p.g_j},
              {"g_i", p.g_i},
              {"species", p.species}};
}

// ---- dipole_dipole ----

PointResult dd_point(const DipoleDipoleParams& p, const NumericsSpec& num) {
  LambDickeConfig cfg{p.eta, {1.0, 1.0, 1.0}, p.dipole, 1.0};
  auto el = pauliblock::me::dipole_dipole_element(p.bra_e, p.bra_g, p.ket_g, p.ket_e, cfg,
                                                  p.cutoff, num.quadrature);
  PointResult out;
  out.row = {p.eta[0],  p.eta[1],  p.eta[2],           p.cutoff,
             el.value,  el.value * p.gamma, el.cutoff_sensitivity};
  if (std::abs(el.cutoff_sensitivity) > 0.05 * std::abs(el.value))
    out.warnings.push_back("dipole-dipole element is cutoff-sensitive: halving the "
                           "cutoff moves it by " +
                           fmt(el.cutoff_sensitivity) + " gamma");
  return out;
}

json dd_inputs(const DipoleDipoleParams& p) {
  return json{{"eta", vec_json(p.eta)},
              {"dipole", vec_json(pauliblock::normalized(p.dipole))},
              {"gamma_rad_s", p.gamma},
              {"bra_e", mode_json(p.bra_e)},
              {"bra_g", mode_json(p.bra_g)},
              {"ket_g", mode_json(p.ket_g)},
              {"ket_e", mode_json(p.ket_e)},
              {"cutoff", p.cutoff}};
}

// ---- quench ----

pauliblock::rates::QuenchConfig quench_config(const QuenchParams& p) {
  pauliblock::rates::QuenchConfig qc;
  qc.omega_dr = p.omega_dr;
  qc.delta_dr = p.delta_dr;
  qc.gamma_1p = p.gamma_1p;
  qc.eta = p.eta;
  qc.eta_dr = p.eta_dr;
  qc.c_up_sq = p.c_up_sq;
  qc.c_dn_sq = 1.0 - p.c_up_sq;
  return qc;
}

PointResult quench_point(const QuenchParams& p) {
  auto qc = quench_config(p);
  auto rate = pauliblock::rates::quench_rate(qc);
  double total = pauliblock::rates::quench_gamma_total(qc);
  PointResult out;
  out.row = {p.omega_dr, p.delta_dr,         p.gamma_1p,
             p.eta,      p.eta_dr,           p.c_up_sq,
             rate.rate,  total,              rate.adiabatic_warning ? 1.0 : 0.0};
  if (rate.adiabatic_warning)
    out.warnings.push_back(
        "adiabatic elimination is marginal: |delta_dr| / gamma_1p < 5");
  return out;
}

json quench_inputs(const QuenchParams& p) {
  return json{{"omega_dr_rad_s", p.omega_dr}, {"delta_dr_rad_s", p.delta_dr},
              {"gamma_1p_rad_s", p.gamma_1p}, {"eta", p.eta},
              {"eta_dr", p.eta_dr},           {"c_up_sq", p.c_up_sq}};
}

// ---- scan plumbing ----

void merge_warnings(RunResult& result, const std::vector<PointResult>& points) {
  // identical warnings collapse; scans would otherwise repeat them per row
  for (const auto& p : points)
    for (const auto& w : p.warnings) {
      bool seen = false;
      for (const auto& have : result.warnings) seen = seen || have == w;
      if (!seen) result.warnings.push_back(w);
    }
}

RunResult run_scannable(const ScenarioConfig& cfg, int parallel,
                        const std::function<PointResult(const ScenarioParams&)>& point_fn,
                        std::vector<std::string> columns, json inputs) {
  RunResult result;
  result.table.columns = std::move(columns);
  result.inputs = std::move(inputs);
  std::vector<PointResult> points;
  if (cfg.scan) {
    auto grid = cfg.scan->grid.expand();
    run_points(
        grid.size(), parallel,
        [&](size_t i) {
          ErrorList errs;
          ScenarioParams params = substitute_scan_value(cfg, grid[i], errs);
          if (!errs.ok())
            throw std::invalid_argument("scan point " + std::to_string(i) + ": " +
                                        errs.errors.front());
          return point_fn(params);
        },
        points);
  } else {
    points.push_back(point_fn(cfg.params));
  }
  result.table.rows.reserve(points.size());
  for (auto& p : points) result.table.rows.push_back(std::move(p.row));
  merge_warnings(result, points);
  return result;
}

// ---- evolve ----

RunResult run_evolve(const ScenarioConfig& cfg) {
  const auto& p = std::get<EvolveParams>(cfg.params);
  // Everything runs in units of the free-space rate; columns carry both.
  LambDickeConfig ld{p.eta, p.nu_over_gamma, p.dipole, 1.0};
  pauliblock::me::FermionBasis basis =
      p.initial == "single_excited"
          ? pauliblock::me::FermionBasis::single(p.n_max)
          : pauliblock::me::FermionBasis::pairs(p.n_max, p.sectors);
  pauliblock::me::DipoleDipoleSpec dd;
  dd.include = p.dd_include;
  dd.cutoff = p.dd_cutoff;
  pauliblock::me::AssembleOptions opts;
  opts.quadrature = cfg.numerics.quadrature;
  auto bundle = pauliblock::me::assemble(ld, basis, dd, opts);

  pauliblock::rates::InitialMotionalState st;
  st.amplitudes[{0, 0, 0}] = 1.0;
  st.blocking_mode = p.blocking_mode;
  st.blocking_present = p.initial != "single_excited";
  Eigen::VectorXcd psi = p.initial == "single_excited"
                             ? pauliblock::me::pure_single_state(basis, st)
                             : pauliblock::me::pure_pair_state(basis, st);
  pauliblock::me::DensityMatrix rho0;
  rho0.rho = psi * psi.adjoint();
  rho0.time = 0.0;

  pauliblock::me::EvolveOptions eopts;
  eopts.rel_tol = cfg.numerics.evolve_rel_tol;
  eopts.abs_tol = cfg.numerics.evolve_abs_tol;
  auto snapshots = pauliblock::me::evolve(rho0, bundle, p.times_gamma, eopts);

  RunResult result;
  result.table.columns = {"t_gamma", "t_s",      "p_excited", "trace",  "sector_0",
                          "sector_1", "sector_2", "nq_x",      "nq_y",   "nq_z"};
  for (const auto& snap : snapshots) {
    auto obs = pauliblock::me::observables(snap, basis);
    result.table.rows.push_back({snap.time, snap.time / p.gamma, obs.p_excited,
                                 obs.trace, obs.sector_population[0],
                                 obs.sector_population[1], obs.sector_population[2],
                                 obs.motional_occupation[0], obs.motional_occupation[1],
                                 obs.motional_occupation[2]});
  }

  result.inputs = json{{"eta", vec_json(p.eta)},
                       {"nu_over_gamma", vec_json(p.nu_over_gamma)},
                       {"nu_rad_s", vec_json({p.nu_over_gamma[0] * p.gamma,
                                              p.nu_over_gamma[1] * p.gamma,
                                              p.nu_over_gamma[2] * p.gamma})},
                       {"dipole", vec_json(ld.dipole_unit())},
                       {"gamma_rad_s", p.gamma},
                       {"initial", p.initial},
                       {"blocking_mode", mode_json(p.blocking_mode)},
                       {"n_times", p.times_gamma.size()}};
  result.numerics = cfg.numerics.echo();
  result.numerics["n_max"] = mode_json(p.n_max);
  result.numerics["sectors"] = json(p.sectors);
  result.numerics["basis_size"] = basis.size();
  result.numerics["dipole_dipole"] =
      json{{"include", p.dd_include}, {"cutoff", p.dd_cutoff}};
  result.numerics["completeness_deficit"] = bundle.completeness_deficit;
  result.numerics["kernel_rank"] = bundle.kernel_rank;

  double p0 = result.table.rows.front()[2];
  double p1 = result.table.rows.back()[2];
  result.summary.push_back("excited population " + fmt(p0) + " -> " + fmt(p1) + " over " +
                           std::to_string(p.times_gamma.size()) + " snapshots");
  result.summary.push_back("completeness deficit " + fmt(bundle.completeness_deficit) +
                           ", " + std::to_string(bundle.jump_channels.size()) +
                           " jump channels");
  if (bundle.completeness_deficit > 0.02)
    result.warnings.push_back("motional truncation leaks up to " +
                              fmt(100.0 * bundle.completeness_deficit, 3) +
                              "% of one decay's weight; raise n_max");
  return result;
}

// ---- photon ----

RunResult run_photon(const ScenarioConfig& cfg) {
  const auto& p = std::get<PhotonParams>(cfg.params);
  pauliblock::photon::PhotonScenario scenario(p.eta, p.nu_over_gamma, 1.0,
                                              cfg.numerics.quadrature);
  pauliblock::photon::SuperpositionInit init;
  init.mu0 = p.mu0;
  init.mu1 = p.mu1;
  auto profile = pauliblock::photon::profile_along_axis(scenario, init, p.t_gamma,
                                                        p.n_samples);
  double norm = pauliblock::photon::emitted_norm(scenario, init, p.t_gamma,
                                                 cfg.numerics.quadrature);
  double beat = pauliblock::photon::beat_period(profile);

  RunResult result;
  result.table.columns = {"x_c_over_gamma", "total", "psi1", "sum0", "sum1", "cross"};
  for (const auto& s : profile.samples)
    result.table.rows.push_back({s.x, s.total, s.psi1, s.sum0, s.sum1, s.cross});

  const auto& front = profile.samples.back();
  const auto& back = profile.samples.front();
  result.inputs = json{{"eta", p.eta},
                       {"nu_over_gamma", p.nu_over_gamma},
                       {"nu_rad_s", p.nu_over_gamma * p.gamma},
                       {"gamma_rad_s", p.gamma},
                       {"mu0", json::array({p.mu0.real(), p.mu0.imag()})},
                       {"mu1", json::array({p.mu1.real(), p.mu1.imag()})},
                       {"t_gamma", p.t_gamma},
                       {"t_s", p.t_gamma / p.gamma}};
  result.numerics = cfg.numerics.echo();
  result.numerics["n_samples"] = p.n_samples;

  result.summary.push_back("effective rates: blocked " + fmt(scenario.gamma_eff0()) +
                           " gamma, spectator excited " + fmt(scenario.gamma_eff1()) +
                           " gamma");
  result.summary.push_back("emitted norm at t = " + fmt(p.t_gamma) + "/gamma: " +
                           fmt(norm, 8));
  if (std::isinf(beat))
    result.summary.push_back("no interference beat (single motional channel)");
  else
    result.summary.push_back("beat period " + fmt(beat, 8) + " c/gamma (2 pi / nu = " +
                             fmt(2.0 * M_PI / p.nu_over_gamma, 8) + ")");
  double dx = profile.samples[1].x - profile.samples[0].x;
  if (!std::isinf(beat) && 2.0 * M_PI / p.nu_over_gamma < 4.0 * dx)
    result.warnings.push_back(
        "sample spacing cannot resolve the nu beat (need dx below (2 pi / nu) / 4); "
        "raise n_samples");
  if (front.total > 0.0)
    result.summary.push_back("wavefront intensity ratio back/front: total " +
                             fmt(back.total / front.total) + ", interfering channel " +
                             fmt(front.psi1 > 0.0 ? back.psi1 / front.psi1 : 0.0));
  if (!scenario.nu_regime_ok())
    result.warnings.push_back(
        "trap sidebands unresolved (nu <= gamma): the two-rate wavepacket model is "
        "outside its regime");
  return result;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, int parallel) {
  RunResult result;
  if (cfg.scenario == "rates") {
    result = run_scannable(
        cfg, parallel,
        [&](const ScenarioParams& params) {
          return rates_point(std::get<RatesParams>(params), cfg.numerics);
        },
        {"eta_x", "eta_y", "eta_z", "gamma_eff_over_gamma", "ld_estimate_over_gamma",
         "gamma_eff_rad_s"},
        rates_inputs(std::get<RatesParams>(cfg.params)));
    result.numerics = cfg.numerics.echo();
    const auto& last = result.table.rows.back();
    result.summary.push_back("gamma_eff / gamma = " + fmt(last[3], 8) +
                             " (leading Lamb-Dicke estimate " + fmt(last[4], 8) + ")");
  } else if (cfg.scenario == "zeeman") {
    const auto& zp = std::get<ZeemanParams>(cfg.params);
    result = run_scannable(
        cfg, parallel,
        [&](const ScenarioParams& params) {
          return zeeman_point(std::get<ZeemanParams>(params));
        },
        zeeman_columns(zp.x_mode), zeeman_inputs(zp));
    result.numerics = json{{"closed_form", true}};
    const auto& last = result.table.rows.back();
    size_t n = last.size();
    result.summary.push_back("no-flip probabilities at x = " + fmt(last[zp.x_mode ? 0 : 1], 6) +
                             ": mF=3/2: " + fmt(last[n - 3], 6) + ", mF=1/2: " +
                             fmt(last[n - 2], 6) + ", mF=-1/2: " + fmt(last[n - 1], 6));
  } else if (cfg.scenario == "dipole_dipole") {
    result = run_scannable(
        cfg, parallel,
        [&](const ScenarioParams& params) {
          return dd_point(std::get<DipoleDipoleParams>(params), cfg.numerics);
        },
        {"eta_x", "eta_y", "eta_z", "cutoff", "value_over_gamma", "value_rad_s",
         "cutoff_sensitivity_over_gamma"},
        dd_inputs(std::get<DipoleDipoleParams>(cfg.params)));
    result.numerics = cfg.numerics.echo();
    const auto& last = result.table.rows.back();
    result.summary.push_back("dipole-dipole element " + fmt(last[4], 8) +
                             " gamma (cutoff sensitivity " + fmt(last[6]) + ")");
  } else if (cfg.scenario == "quench") {
    const auto& qp = std::get<QuenchParams>(cfg.params);
    if (!qp.times_s.empty()) {
      auto qc = quench_config(qp);
      auto rate = pauliblock::rates::quench_rate(qc);
      result.table.columns = {"t_s", "p_e_up", "p_g_up", "p_g_dn"};
      for (double t : qp.times_s) {
        auto pop = pauliblock::rates::rate_equation_solution(qc, t);
        result.table.rows.push_back({t, pop.p_e_up, pop.p_g_up, pop.p_g_dn});
      }
      result.inputs = quench_inputs(qp);
      if (rate.adiabatic_warning)
        result.warnings.push_back(
            "adiabatic elimination is marginal: |delta_dr| / gamma_1p < 5");
      result.summary.push_back("effective quench rate = " + format_double(rate.rate) +
                               " s^-1");
      result.summary.push_back("blocked total rate = " +
                               format_double(pauliblock::rates::quench_gamma_total(qc)) +
                               " s^-1");
    } else {
      result = run_scannable(
          cfg, parallel,
          [&](const ScenarioParams& params) {
            return quench_point(std::get<QuenchParams>(params));
          },
          {"omega_dr_rad_s", "delta_dr_rad_s", "gamma_1p_rad_s", "eta", "eta_dr",
           "c_up_sq", "rate_per_s", "gamma_total_per_s", "adiabatic_warning"},
          quench_inputs(qp));
      const auto& last = result.table.rows.back();
      result.summary.push_back("effective quench rate = " + format_double(last[6]) +
                               " s^-1");
      result.summary.push_back("blocked total rate = " + format_double(last[7]) +
                               " s^-1");
    }
    result.numerics = json{{"closed_form", true}};
  } else if (cfg.scenario == "evolve") {
    result = run_evolve(cfg);
  } else if (cfg.scenario == "photon") {
    result = run_photon(cfg);
  } else {
    throw std::logic_error("unreachable scenario dispatch");
  }
  return result;
}

}  // namespace simulate
