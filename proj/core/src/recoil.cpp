#include "pauliblock/recoil.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pauliblock/laguerre.hpp"

namespace pauliblock::recoil {

namespace {
constexpr Complex I{0.0, 1.0};
}

Complex element_1d(int m, int n, double kappa) {
  if (m < 0 || n < 0) throw std::invalid_argument("element_1d: negative mode index");
  if (kappa == 0.0) return m == n ? 1.0 : 0.0;
  int lo = std::min(m, n), hi = std::max(m, n), d = hi - lo;
  double x = kappa * kappa;
  // Magnitude in the log domain: the factorial ratio lo!/hi! underflows fast.
  double logmag = -0.5 * x + 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0)) +
                  d * std::log(std::abs(kappa));
  double lag = laguerre(lo, d, x);
  // (-i kappa)^d with |kappa| folded into logmag: phase cycles 1,-i,-1,i and
  // flips sign for negative kappa at odd d.
  static constexpr Complex cycle[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  Complex phase = cycle[d % 4];
  if (kappa < 0.0 && d % 2 == 1) phase = -phase;
  return phase * std::exp(logmag) * lag;
}

Complex element_ld(int m, int n, double kappa) {
  if (m < 0 || n < 0) throw std::invalid_argument("element_ld: negative mode index");
  int lo = std::min(m, n), hi = std::max(m, n), d = hi - lo;
  double x = kappa * kappa;
  switch (d) {
    case 0:
      return 1.0 - (hi + 0.5) * x;
    case 1:
      return -I * kappa * std::sqrt(static_cast<double>(hi));
    case 2:
      return -0.5 * x * std::sqrt(static_cast<double>(hi) * (hi - 1));
    default:
      throw std::invalid_argument("element_ld: |m-n| > 2 has no weight at this order");
  }
}

Complex element_3d(const Mode3& m, const Mode3& n, const Vec3& khat,
                   const LambDickeConfig& cfg) {
  Complex out{1.0, 0.0};
  for (int j = 0; j < 3; ++j) out *= element_1d(m[j], n[j], khat[j] * cfg.eta[j]);
  return out;
}

double dipole_pattern(const Vec3& khat, const Vec3& dipole) {
  Vec3 d = normalized(dipole);
  double c = dot(d, khat);
  return 3.0 / (8.0 * std::numbers::pi) * (1.0 - c * c);
}

double projected_pattern(double u, double dipole_dot_axis) {
  double w2 = dipole_dot_axis * dipole_dot_axis;
  return 0.375 * (1.0 + u * u + w2 - 3.0 * u * u * w2);
}

std::array<double, 3> alpha_coefficients(const Vec3& dipole) {
  Vec3 d = normalized(dipole);
  return {(2.0 - d[0] * d[0]) / 5.0, (2.0 - d[1] * d[1]) / 5.0, (2.0 - d[2] * d[2]) / 5.0};
}

namespace {

bool parity_forbidden(const Mode3& np, const Mode3& mp, const Mode3& m, const Mode3& n) {
  for (int j = 0; j < 3; ++j)
    if ((np[j] + mp[j] + m[j] + n[j]) % 2 != 0) return true;
  return false;
}

}  // namespace

double rtilde(const Mode3& np, const Mode3& mp, const Mode3& m, const Mode3& n,
              const LambDickeConfig& cfg, const QuadratureOptions& opts) {
  cfg.validate();
  if (parity_forbidden(np, mp, m, n)) return 0.0;
  Vec3 d = cfg.dipole_unit();
  auto f = [&](const Vec3& khat) {
    Complex a = element_3d(np, mp, khat, cfg);
    Complex b = element_3d(m, n, khat, cfg);
    return (std::conj(a) * b).real() * dipole_pattern(khat, d);
  };
  return integrate_sphere(f, opts);
}

RtildeLd rtilde_ld(const Mode3& np, const Mode3& mp, const Mode3& m, const Mode3& n,
                   const LambDickeConfig& cfg) {
  cfg.validate();
  auto alpha = alpha_coefficients(cfg.dipole);

  // Classify each bra/ket pair by its per-axis index changes.
  Mode3 d1, d2;
  int nd1 = 0, nd2 = 0, ax1 = -1, ax2 = -1;
  for (int j = 0; j < 3; ++j) {
    d1[j] = std::abs(np[j] - mp[j]);
    d2[j] = std::abs(m[j] - n[j]);
    if (d1[j] != 0) {
      nd1 += d1[j];
      ax1 = j;
    }
    if (d2[j] != 0) {
      nd2 += d2[j];
      ax2 = j;
    }
  }

  auto off_axes_1 = [&](int skip) {
    for (int j = 0; j < 3; ++j)
      if (j != skip && d1[j] != 0) return false;
    return true;
  };
  auto off_axes_2 = [&](int skip) {
    for (int j = 0; j < 3; ++j)
      if (j != skip && d2[j] != 0) return false;
    return true;
  };

  if (nd1 == 0 && nd2 == 0) {
    // nd == 0 forces np == mp and m == n componentwise.
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      s += (mp[j] + m[j] + 1.0) * alpha[j] * cfg.eta[j] * cfg.eta[j];
    return {1.0 - s, false};
  }

  if (nd1 == 1 && nd2 == 1 && ax1 == ax2 && off_axes_1(ax1) && off_axes_2(ax2)) {
    int i = ax1;
    double mpv = std::max(np[i], mp[i]);
    double mv = std::max(m[i], n[i]);
    return {alpha[i] * cfg.eta[i] * cfg.eta[i] * std::sqrt(mpv * mv), false};
  }

  if (nd1 == 0 && nd2 == 2 && off_axes_2(ax2) && np == mp) {
    int i = ax2;
    double hv = std::max(m[i], n[i]);
    return {-0.5 * alpha[i] * cfg.eta[i] * cfg.eta[i] * std::sqrt(hv * (hv - 1.0)), false};
  }
  if (nd2 == 0 && nd1 == 2 && off_axes_1(ax1) && m == n) {
    int i = ax1;
    double hv = std::max(np[i], mp[i]);
    return {-0.5 * alpha[i] * cfg.eta[i] * cfg.eta[i] * std::sqrt(hv * (hv - 1.0)), false};
  }

  return {0.0, !parity_forbidden(np, mp, m, n)};
}

double completeness_deficit_1d(int n, double kappa, int m_max) {
  if (n < 0 || m_max < 0) throw std::invalid_argument("completeness_deficit_1d: bad index");
  double s = 0.0;
  for (int m = 0; m <= m_max; ++m) s += std::norm(element_1d(m, n, kappa));
  return 1.0 - s;
}

}  // namespace pauliblock::recoil
