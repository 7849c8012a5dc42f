#pragma once

#include <map>

#include "pauliblock/quadrature.hpp"
#include "pauliblock/types.hpp"

namespace pauliblock::rates {

// Motional wavefunction of the excited atom, expanded over number states,
// together with the mode occupied by the identical ground-state spectator.
// Emission that would land the decaying atom in the spectator's mode is
// Pauli-forbidden; blocking_present = false recovers free-space decay.
struct InitialMotionalState {
  std::map<Mode3, Complex> amplitudes;
  Mode3 blocking_mode{0, 0, 0};
  bool blocking_present = true;

  static InitialMotionalState ground();

  void validate() const;
};

// Effective decay rate, in units of the free-space rate, for motion along a
// single axis with the atom pair in the motional ground state:
//   Gamma_eff / Gamma = integral N_proj(u) (1 - e^{-u^2 eta^2}) du.
// dipole_dot_axis is the projection of the dipole orientation on the motion
// axis. blocked = false returns exactly 1.
double gamma_eff_1d(double eta, double dipole_dot_axis, bool blocked,
                    const QuadratureOptions& opts = {});

// Effective decay rate (absolute, in units of cfg.gamma times one) for an
// arbitrary initial motional superposition:
//   Gamma_eff = gamma (1 - integral dOmega N(khat) |sum_n r_n R_{bn}(khat)|^2).
double gamma_eff_general(const InitialMotionalState& state, const LambDickeConfig& cfg,
                         const QuadratureOptions& opts = {});

// Motional state imprinted by absorbing an excitation photon from direction
// khat_laser: r_n = prod_j <n_j| e^{i kappa_j X} |0> with kappa_j =
// khat_j eta_j. Modes are kept per axis up to n_max; amplitudes below 1e-12
// in magnitude are dropped.
InitialMotionalState laser_recoil(const Vec3& khat_laser, const LambDickeConfig& cfg,
                                  int n_max = 12);

// Off-resonant quench of the excited state through a fast auxiliary level:
// Rabi frequency omega_dr, detuning delta_dr, auxiliary linewidth gamma_1p,
// all in rad/s. The dressed decay rate is omega^2 gamma_1p / (4 delta^2).
// Spin mixing of the ground state (c_up_sq + c_dn_sq = 1) splits the decay:
// the spin-up channel is Pauli-blocked down to (eta^2 + eta_dr^2), the
// spin-down channel is open.
struct QuenchConfig {
  double omega_dr = 0.0;
  double delta_dr = 0.0;
  double gamma_1p = 0.0;
  double eta = 0.0;
  double eta_dr = 0.0;
  double c_up_sq = 1.0;
  double c_dn_sq = 0.0;

  void validate() const;
};

struct QuenchRate {
  double rate = 0.0;  // rad/s
  // Set when delta_dr / gamma_1p < 5: the second-order elimination of the
  // auxiliary level is then marginal.
  bool adiabatic_warning = false;
};

QuenchRate quench_rate(const QuenchConfig& cfg);

// Total depletion rate of the blocked excited atom.
double quench_gamma_total(const QuenchConfig& cfg);

// Closed-form solution of the two-channel rate equations with the excited
// population starting at 1. Populations sum to 1 at all times.
struct Populations {
  double p_e_up = 0.0;
  double p_g_up = 0.0;
  double p_g_dn = 0.0;
};

Populations rate_equation_solution(const QuenchConfig& cfg, double t);

}  // namespace pauliblock::rates
