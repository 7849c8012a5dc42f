#pragma once

#include <array>

#include "pauliblock/quadrature.hpp"
#include "pauliblock/types.hpp"

namespace pauliblock::recoil {

// Matrix element <m| e^{-i kappa X} |n> between harmonic-oscillator number
// states, X in units of the ground-state size. Symmetric under m <-> n.
// kappa = 0 gives the identity; the element is exp(-kappa^2/2) times a
// generalized Laguerre polynomial with a phase (-i kappa)^{|m-n|} folded in.
Complex element_1d(int m, int n, double kappa);

// Lamb-Dicke expansion of element_1d through second order in kappa. Only
// |m - n| <= 2 carries weight at this order; larger jumps throw.
Complex element_ld(int m, int n, double kappa);

// Product over axes with per-axis recoil kappa_j = khat_j * eta_j.
Complex element_3d(const Mode3& m, const Mode3& n, const Vec3& khat,
                   const LambDickeConfig& cfg);

// Angular distribution of dipole radiation, normalized to 1 over the sphere:
// N(khat) = (3/8pi) (1 - (dhat . khat)^2).
double dipole_pattern(const Vec3& khat, const Vec3& dipole);

// Marginal of N over the azimuth about a chosen axis, as a density in
// u = khat . axis on [-1, 1], for a dipole with projection w = dhat . axis:
// N_proj(u) = (3/8) (1 + u^2 + w^2 - 3 u^2 w^2). Integrates to 1.
double projected_pattern(double u, double dipole_dot_axis);

// Second angular moments of the dipole pattern: alpha_j = (2 - dhat_j^2)/5,
// so that integral N(khat) khat_j^2 dOmega = alpha_j and sum_j alpha_j = 1.
std::array<double, 3> alpha_coefficients(const Vec3& dipole);

// Two-body recoil overlap integral
//   rtilde(n',m',m,n) = integral dOmega N(khat) conj(R_{n'm'}) R_{mn},
// real by the khat -> -khat symmetry of the integrand. Vanishes exactly
// when any axis has odd total index parity n'_j+m'_j+m_j+n_j.
double rtilde(const Mode3& np, const Mode3& mp, const Mode3& m, const Mode3& n,
              const LambDickeConfig& cfg, const QuadratureOptions& opts = {});

// Closed form for rtilde through second order in the Lamb-Dicke parameters.
// Covers: both index pairs diagonal; both pairs hopping one quantum on one
// shared axis; one pair diagonal and the other jumping two quanta on one
// axis. Everything else is zero at this order; higher_order flags patterns
// whose leading contribution lies beyond O(eta^2).
struct RtildeLd {
  double value = 0.0;
  bool higher_order = false;
};
RtildeLd rtilde_ld(const Mode3& np, const Mode3& mp, const Mode3& m, const Mode3& n,
                   const LambDickeConfig& cfg);

// 1 - sum_{m<=m_max} |<m|e^{-i kappa X}|n>|^2: weight pushed above a motional
// truncation by a single recoil. Gauges basis-size adequacy.
double completeness_deficit_1d(int n, double kappa, int m_max);

}  // namespace pauliblock::recoil
