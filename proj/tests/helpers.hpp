#pragma once

#include <cmath>
#include <random>

#include "pauliblock/types.hpp"

namespace test_helpers {

// Fixed seed so frozen expectations stay stable across runs and platforms.
inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eedu);
  return gen;
}

inline pauliblock::Vec3 random_unit_vec() {
  std::normal_distribution<double> g(0.0, 1.0);
  pauliblock::Vec3 v{g(rng()), g(rng()), g(rng())};
  return pauliblock::normalized(v);
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace test_helpers
