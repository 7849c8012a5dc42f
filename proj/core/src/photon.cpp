#include "pauliblock/photon.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pauliblock/rates.hpp"
#include "pauliblock/recoil.hpp"

namespace pauliblock::photon {

namespace {

constexpr Complex I{0.0, 1.0};

LambDickeConfig axis_config(double eta, double nu, double gamma) {
  LambDickeConfig cfg;
  cfg.eta = {eta, 0.0, 0.0};
  cfg.nu = {nu, nu, nu};
  cfg.dipole = {0.0, 0.0, 1.0};
  cfg.gamma = gamma;
  return cfg;
}

// Channel weights |R_{0n}(kappa)|^2 for n > 1, summed until the next term
// drops below 1e-12 of the running total (base = the n <= 1 weights).
double tail_weight(double kappa, double base) {
  double sum = 0.0;
  for (int n = 2; n <= 60; ++n) {
    double term = std::norm(recoil::element_1d(0, n, kappa));
    if (term < 1e-12 * (base + sum)) break;
    sum += term;
  }
  return sum;
}

struct Components {
  double psi1 = 0.0;
  double sum0 = 0.0;
  double sum1 = 0.0;
  double cross = 0.0;
};

// The braces of the printed intensity at recoil angle u and retarded time
// tau, before the sin^2(theta) dipole factor. The {0,1} channel is kept as
// an explicit squared modulus so its positivity is exact; the relative
// conjugation of the two paths is fixed by the requirement that the state
// mu1 = i|mu1| suppresses emission along -x (the recoil phase R_01 ~ -iu).
Components components_at(const PhotonScenario& s, const SuperpositionInit& init, double u,
                         double tau) {
  Components c;
  if (tau < 0.0) return c;
  double kappa = s.eta() * u;
  Complex r01 = recoil::element_1d(0, 1, kappa);
  double r00 = recoil::element_1d(0, 0, kappa).real();
  double g0 = s.gamma_eff0();
  double g1 = s.gamma_eff1();

  Complex a = init.mu0 * r01 * std::exp(-0.5 * g0 * tau);
  Complex b = init.mu1 * r00 * std::exp(Complex(0.0, s.nu() * tau)) *
              std::exp(-0.5 * g1 * tau);
  c.psi1 = std::norm(a - b);
  c.cross = c.psi1 - std::norm(a) - std::norm(b);

  double base = std::norm(init.mu0 * r01) + std::norm(init.mu1 * r00);
  double tail = tail_weight(kappa, base);
  c.sum0 = std::norm(init.mu0) * tail * std::exp(-g0 * tau);
  c.sum1 = std::norm(init.mu1) * tail * std::exp(-g1 * tau);
  return c;
}

}  // namespace

void SuperpositionInit::validate() const {
  double norm = std::norm(mu0) + std::norm(mu1);
  if (std::abs(norm - 1.0) > 1e-12)
    throw std::invalid_argument("superposition amplitudes must satisfy |mu0|^2 + |mu1|^2 = 1");
}

PhotonScenario::PhotonScenario(double eta, double nu, double gamma,
                               const QuadratureOptions& opts)
    : eta_(eta), nu_(nu), gamma_(gamma) {
  if (!(eta > 0.0 && eta <= 2.0)) throw std::invalid_argument("eta must lie in (0, 2]");
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

  auto cfg = axis_config(eta, nu, gamma);
  auto blocked0 = rates::InitialMotionalState::ground();
  gamma_eff0_ = rates::gamma_eff_general(blocked0, cfg, opts);
  auto blocked1 = rates::InitialMotionalState::ground();
  blocked1.blocking_mode = {1, 0, 0};
  gamma_eff1_ = rates::gamma_eff_general(blocked1, cfg, opts);
  if (!(gamma_eff0_ < gamma_eff1_))
    throw std::invalid_argument("confinement too weak: spectator-|0> decay is not blocked");
}

double PhotonScenario::regime_time(const SuperpositionInit& init) const {
  return 10.0 / (std::norm(init.mu0) > 0.0 ? gamma_eff0_ : gamma_eff1_);
}

Complex ww_amplitude(const PhotonScenario& s, const SuperpositionInit& init, int m, int n,
                     double delta, double u, double t) {
  init.validate();
  if (m < 0 || n <= m) throw std::invalid_argument("final pair needs 0 <= m < n");
  if (std::abs(u) > 1.0 + 1e-12) throw std::invalid_argument("u must lie in [-1, 1]");
  if (t < s.regime_time(init))
    throw std::invalid_argument("asymptotic amplitudes need t >= 10 / Gamma_eff");
  if (m > 1) return {0.0, 0.0};

  double kappa = s.eta() * u;
  double g0 = s.gamma_eff0();
  double g1 = s.gamma_eff1();
  auto lorentz0 = [&](int q) { return Complex(delta + q * s.nu(), 0.5 * g0); };
  auto lorentz1 = [&](int q) { return Complex(delta + q * s.nu(), 0.5 * g1); };

  if (m == 0 && n == 1) {
    Complex bracket = init.mu0 * recoil::element_1d(0, 1, kappa) / lorentz0(1) -
                      init.mu1 * recoil::element_1d(0, 0, kappa) / lorentz1(0);
    return std::exp(-I * (delta + s.nu()) * t) * bracket;
  }
  if (m == 0) {
    return std::exp(-I * (delta + double(n) * s.nu()) * t) * init.mu0 *
           recoil::element_1d(0, n, kappa) / lorentz0(n);
  }
  return std::exp(-I * (delta + double(n + 1) * s.nu()) * t) * init.mu1 *
         recoil::element_1d(0, n, kappa) / lorentz1(n + 1);
}

double intensity(const PhotonScenario& s, const SuperpositionInit& init, double r,
                 double theta, double t) {
  init.validate();
  if (r < 0.0 || t < 0.0) throw std::invalid_argument("intensity needs r, t >= 0");
  double tau = t - r;
  if (tau < 0.0) return 0.0;
  double sin_theta = std::sin(theta);
  auto c = components_at(s, init, sin_theta, tau);
  return sin_theta * sin_theta * (c.psi1 + c.sum0 + c.sum1);
}

WavepacketProfile profile_along_axis(const PhotonScenario& s, const SuperpositionInit& init,
                                     double t, int n_samples) {
  init.validate();
  if (n_samples < 3) throw std::invalid_argument("profile needs at least 3 samples");
  if (t < s.regime_time(init))
    throw std::invalid_argument("asymptotic profile needs t >= 10 / Gamma_eff");

  WavepacketProfile profile;
  profile.t = t;
  profile.samples.resize(n_samples);
  double dx = 2.0 * t / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    double x = -t + i * dx;
    double u = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    auto c = components_at(s, init, u, t - std::abs(x));
    auto& out = profile.samples[i];
    out.x = x;
    out.psi1 = c.psi1;
    out.sum0 = c.sum0;
    out.sum1 = c.sum1;
    out.cross = c.cross;
    out.total = c.psi1 + c.sum0 + c.sum1;
  }
  return profile;
}

double beat_period(const WavepacketProfile& profile) {
  std::vector<double> signal;
  double dx = 0.0;
  for (size_t i = 0; i < profile.samples.size(); ++i) {
    if (profile.samples[i].x <= 0.0) continue;
    if (signal.empty() && i > 0) dx = profile.samples[i].x - profile.samples[i - 1].x;
    signal.push_back(profile.samples[i].cross);
  }
  auto n = static_cast<long>(signal.size());
  if (n < 4 || dx <= 0.0) return std::numeric_limits<double>::infinity();

  long best_k = 0;
  double best_power = 0.0;
  for (long k = 1; k <= n / 2; ++k) {
    Complex f{0.0, 0.0};
    for (long j = 0; j < n; ++j)
      f += signal[j] * std::exp(Complex(0.0, -2.0 * M_PI * j * k / n));
    double power = std::norm(f);
    if (power > best_power) {
      best_power = power;
      best_k = k;
    }
  }
  if (best_k == 0 || best_power < 1e-280) return std::numeric_limits<double>::infinity();
  return n * dx / best_k;
}

double emitted_norm(const PhotonScenario& s, const SuperpositionInit& init, double t,
                    const QuadratureOptions& opts) {
  init.validate();
  if (t < 0.0) throw std::invalid_argument("emitted_norm needs t >= 0");
  double g0 = s.gamma_eff0();
  double g1 = s.gamma_eff1();
  double gbar = 0.5 * (g0 + g1);
  // Retarded-time integrals over [0, t] done in closed form per channel; the
  // angular integral reduces to the azimuthal marginal of the dipole pattern
  // because the integrand only sees u = khat . xhat.
  double int0 = -std::expm1(-g0 * t) / g0;
  double int1 = -std::expm1(-g1 * t) / g1;
  Complex pole{gbar, s.nu()};
  Complex int_cross = (1.0 - std::exp(-pole * t)) / pole;

  auto f = [&](double u) {
    double kappa = s.eta() * u;
    Complex r01 = recoil::element_1d(0, 1, kappa);
    double r00 = recoil::element_1d(0, 0, kappa).real();
    double base = std::norm(init.mu0 * r01) + std::norm(init.mu1 * r00);
    double tail = tail_weight(kappa, base);
    double val = std::norm(init.mu0) * (std::norm(r01) + tail) * int0 +
                 std::norm(init.mu1) * (r00 * r00 + tail) * int1 -
                 2.0 * (init.mu0 * std::conj(init.mu1) * r01 * r00 * int_cross).real();
    return recoil::projected_pattern(u, 0.0) * val;
  };
  return s.gamma() * integrate_interval(f, -1.0, 1.0, opts);
}

}  // namespace pauliblock::photon
