#pragma once

#include "pauliblock/quadrature.hpp"
#include "pauliblock/types.hpp"

namespace pauliblock::me {

// Coherent dipole-dipole exchange coefficient between two atoms on the same
// site, in units of cfg.gamma. The two-body matrix element couples the pair
// (g m, e n) to (g m', e n'); in scaled coordinates y = k0 x it reads
//   L = (3/4) integral_{r >= r_lo} dr/r dOmega (1 - 3 (dhat.rhat)^2)
//       prod_j F_j(r rhat_j),
//   F_j(s) = integral dY psi_{n'_j}(Y + s/2) psi_{m_j}(Y + s/2)
//                       psi_{m'_j}(Y - s/2) psi_{n_j}(Y - s/2)
// with oscillator wavefunctions of length sqrt(2) eta_j. The angular
// quadrupole structure makes the integral converge as the short-distance
// cutoff shrinks; cutoff is given in units of the smallest ground-state
// size and must lie in (1e-4, 1). cutoff_sensitivity reports the change
// under halving the cutoff.
struct DipoleDipoleElement {
  double value = 0.0;
  double cutoff_sensitivity = 0.0;
};

DipoleDipoleElement dipole_dipole_element(const Mode3& np, const Mode3& mp, const Mode3& m,
                                          const Mode3& n, const LambDickeConfig& cfg,
                                          double cutoff,
                                          const QuadratureOptions& opts = {});

}  // namespace pauliblock::me
