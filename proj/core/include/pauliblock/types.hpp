#pragma once

#include <array>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pauliblock {

using Vec3 = std::array<double, 3>;
using Mode3 = std::array<int, 3>;
using Complex = std::complex<double>;

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return {a[0] / n, a[1] / n, a[2] / n};
}

// Trap and emission parameters for one lattice site. Lengths are expressed
// through the Lamb-Dicke parameters eta_j = k0 * x0_j (x0_j = ground-state
// size along axis j), trap frequencies nu_j in units of the free-space decay
// rate gamma, and the dipole orientation as a unit vector.
struct LambDickeConfig {
  Vec3 eta{0.0, 0.0, 0.0};
  Vec3 nu{1.0, 1.0, 1.0};
  Vec3 dipole{0.0, 0.0, 1.0};
  double gamma = 1.0;

  void validate() const {
    for (double e : eta)
      if (!(e >= 0.0) || e > 2.0)
        throw std::invalid_argument("eta components must lie in [0, 2]");
    for (double n : nu)
      if (!(n > 0.0)) throw std::invalid_argument("nu components must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    if (norm(dipole) == 0.0)
      throw std::invalid_argument("dipole orientation must be nonzero");
  }

  Vec3 dipole_unit() const { return normalized(dipole); }
};

}  // namespace pauliblock
