#include "pauliblock/rates.hpp"

#include <cmath>
#include <stdexcept>

#include "pauliblock/recoil.hpp"

namespace pauliblock::rates {

InitialMotionalState InitialMotionalState::ground() {
  InitialMotionalState s;
  s.amplitudes[{0, 0, 0}] = 1.0;
  return s;
}

void InitialMotionalState::validate() const {
  if (amplitudes.empty())
    throw std::invalid_argument("initial motional state has no amplitudes");
  double n2 = 0.0;
  for (const auto& [mode, amp] : amplitudes) {
    for (int j = 0; j < 3; ++j)
      if (mode[j] < 0) throw std::invalid_argument("negative motional index");
    n2 += std::norm(amp);
  }
  if (std::abs(n2 - 1.0) > 1e-6)
    throw std::invalid_argument("initial motional state is not normalized");
  for (int j = 0; j < 3; ++j)
    if (blocking_mode[j] < 0) throw std::invalid_argument("negative blocking mode index");
}

double gamma_eff_1d(double eta, double dipole_dot_axis, bool blocked,
                    const QuadratureOptions& opts) {
  if (!(eta >= 0.0)) throw std::invalid_argument("gamma_eff_1d: eta must be >= 0");
  if (!blocked) return 1.0;
  double e2 = eta * eta;
  return integrate_interval(
      [&](double u) {
        return recoil::projected_pattern(u, dipole_dot_axis) * (1.0 - std::exp(-u * u * e2));
      },
      -1.0, 1.0, opts);
}

double gamma_eff_general(const InitialMotionalState& state, const LambDickeConfig& cfg,
                         const QuadratureOptions& opts) {
  state.validate();
  cfg.validate();
  if (!state.blocking_present) return cfg.gamma;
  Vec3 d = cfg.dipole_unit();
  const Mode3& b = state.blocking_mode;
  double overlap = integrate_sphere(
      [&](const Vec3& khat) {
        Complex amp{0.0, 0.0};
        for (const auto& [mode, r] : state.amplitudes)
          amp += r * recoil::element_3d(b, mode, khat, cfg);
        return std::norm(amp) * recoil::dipole_pattern(khat, d);
      },
      opts);
  return cfg.gamma * (1.0 - overlap);
}

InitialMotionalState laser_recoil(const Vec3& khat_laser, const LambDickeConfig& cfg,
                                  int n_max) {
  cfg.validate();
  if (n_max < 0 || n_max > 60) throw std::invalid_argument("laser_recoil: n_max out of range");
  if (std::abs(norm(khat_laser) - 1.0) > 1e-9)
    throw std::invalid_argument("laser_recoil: khat_laser must be a unit vector");

  // Per-axis absorption amplitudes <n|e^{i kappa X}|0> = conj(<n|e^{-i kappa X}|0>).
  std::array<std::vector<Complex>, 3> axis;
  for (int j = 0; j < 3; ++j) {
    double kappa = khat_laser[j] * cfg.eta[j];
    axis[j].reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
      axis[j].push_back(std::conj(recoil::element_1d(n, 0, kappa)));
  }

  InitialMotionalState out;
  out.amplitudes.clear();
  constexpr double floor = 1e-12;
  for (int nx = 0; nx <= n_max; ++nx) {
    if (std::abs(axis[0][nx]) < floor) continue;
    for (int ny = 0; ny <= n_max; ++ny) {
      Complex axy = axis[0][nx] * axis[1][ny];
      if (std::abs(axy) < floor) continue;
      for (int nz = 0; nz <= n_max; ++nz) {
        Complex a = axy * axis[2][nz];
        if (std::abs(a) < floor) continue;
        out.amplitudes[{nx, ny, nz}] = a;
      }
    }
  }
  if (out.amplitudes.empty())
    throw std::logic_error("laser_recoil: truncation removed every mode");
  return out;
}

void QuenchConfig::validate() const {
  if (!(omega_dr > 0.0)) throw std::invalid_argument("quench: omega_dr must be positive");
  if (!(gamma_1p > 0.0)) throw std::invalid_argument("quench: gamma_1p must be positive");
  if (delta_dr == 0.0) throw std::invalid_argument("quench: delta_dr must be nonzero");
  if (eta < 0.0 || eta_dr < 0.0) throw std::invalid_argument("quench: eta must be >= 0");
  if (c_up_sq < 0.0 || c_dn_sq < 0.0 || std::abs(c_up_sq + c_dn_sq - 1.0) > 1e-9)
    throw std::invalid_argument("quench: spin weights must be nonnegative and sum to 1");
}

QuenchRate quench_rate(const QuenchConfig& cfg) {
  cfg.validate();
  QuenchRate out;
  out.rate = cfg.omega_dr * cfg.omega_dr * cfg.gamma_1p / (4.0 * cfg.delta_dr * cfg.delta_dr);
  out.adiabatic_warning = std::abs(cfg.delta_dr) / cfg.gamma_1p < 5.0;
  return out;
}

double quench_gamma_total(const QuenchConfig& cfg) {
  double r = quench_rate(cfg).rate;
  return (cfg.c_up_sq * (cfg.eta * cfg.eta + cfg.eta_dr * cfg.eta_dr) + cfg.c_dn_sq) * r;
}

Populations rate_equation_solution(const QuenchConfig& cfg, double t) {
  if (t < 0.0) throw std::invalid_argument("rate_equation_solution: t must be >= 0");
  double r = quench_rate(cfg).rate;
  double g_up = cfg.c_up_sq * (cfg.eta * cfg.eta + cfg.eta_dr * cfg.eta_dr) * r;
  double g_dn = cfg.c_dn_sq * r;
  double g_tot = g_up + g_dn;
  Populations p;
  if (g_tot == 0.0) {
    p.p_e_up = 1.0;
    return p;
  }
  double decayed = -std::expm1(-g_tot * t);
  p.p_e_up = 1.0 - decayed;
  // Branching ratios conserve total population exactly.
  p.p_g_up = decayed * (g_up / g_tot);
  p.p_g_dn = decayed * (g_dn / g_tot);
  return p;
}

}  // namespace pauliblock::rates
