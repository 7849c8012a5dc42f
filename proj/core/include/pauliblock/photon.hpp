#pragma once

#include <vector>

#include "pauliblock/quadrature.hpp"
#include "pauliblock/types.hpp"

namespace pauliblock::photon {

// Single-excitation (Weisskopf-Wigner) model of the photon emitted by a
// blocked pair: motion along x, dipole along z, c = 1. The excited atom sits
// in the lowest motional band; the spectator carries the superposition.

// Spectator amplitudes on motional |0> and |1>.
struct SuperpositionInit {
  Complex mu0{1.0, 0.0};
  Complex mu1{0.0, 0.0};

  void validate() const;
};

class PhotonScenario {
 public:
  PhotonScenario(double eta, double nu, double gamma = 1.0,
                 const QuadratureOptions& opts = {});

  double eta() const { return eta_; }
  double nu() const { return nu_; }
  double gamma() const { return gamma_; }
  // Orientation coefficient of the motion axis, (2 - dhat_x^2)/5 = 2/5 here.
  double alpha() const { return 0.4; }

  // Blocked decay rates for the spectator in |0> or |1>, evaluated from the
  // full angular integrals rather than their alpha eta^2 Gamma and
  // (1 - alpha eta^2) Gamma leading-order forms; the exact values are what
  // make the emitted wavepacket integrate to the decayed population.
  double gamma_eff0() const { return gamma_eff0_; }
  double gamma_eff1() const { return gamma_eff1_; }

  // The shaping analysis assumes Gamma << nu; soft condition, reported only.
  bool nu_regime_ok() const { return nu_ > gamma_; }

  // Earliest time at which the asymptotic amplitude formulas apply.
  double regime_time(const SuperpositionInit& init) const;

 private:
  double eta_;
  double nu_;
  double gamma_;
  double gamma_eff0_;
  double gamma_eff1_;
};

// Reduced photon amplitude for the final motional pair {m, n}, m < n, with
// the field prefactor and the carrier e^{-i omega_0 t} divided out. delta is
// the photon detuning omega_k - omega_0, u = khat . xhat. Pairs with m > 1
// carry no amplitude in this model and return zero.
Complex ww_amplitude(const PhotonScenario& s, const SuperpositionInit& init, int m, int n,
                     double delta, double u, double t);

// Dimensionless intensity Ihat at distance r, polar angle theta from the
// dipole axis, azimuth fixed in the x-z plane. The printed far-field
// prefactor d^2 omega_0^4 sin^2(theta) / (4 pi eps_0)^2 c^2 r^2 is divided
// out except for the sin^2(theta) factor, which is kept.
double intensity(const PhotonScenario& s, const SuperpositionInit& init, double r,
                 double theta, double t);

struct WavepacketSample {
  double x = 0.0;  // units of c / gamma
  double total = 0.0;
  double psi1 = 0.0;  // interfering {0,1} channel, cross term included
  double sum0 = 0.0;  // spectator-|0> channels with n > 1
  double sum1 = 0.0;  // spectator-|1> channels with n > 1
  double cross = 0.0;
};

struct WavepacketProfile {
  std::vector<WavepacketSample> samples;
  double t = 0.0;
};

// Ihat sampled along the motion axis for x in [-ct, ct]. Requires
// t >= regime_time(init).
WavepacketProfile profile_along_axis(const PhotonScenario& s, const SuperpositionInit& init,
                                     double t, int n_samples = 4001);

// Spatial beat period of the oscillating interference component on the
// x > 0 half of the profile, from the peak of its discrete Fourier
// transform. Infinity when the profile carries no beat.
double beat_period(const WavepacketProfile& profile);

// Total emission probability up to time t: Ihat integrated over directions
// and over the radial extent of the wavepacket. Tends to 1 as t grows for
// any normalized initial state.
double emitted_norm(const PhotonScenario& s, const SuperpositionInit& init, double t,
                    const QuadratureOptions& opts = {});

}  // namespace pauliblock::photon
