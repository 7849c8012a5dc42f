#include <cmath>

#include "doctest.h"
#include "pauliblock/zeeman.hpp"

using namespace pauliblock::zeeman;

TEST_CASE("hamiltonian is symmetric and block-diagonal in m_F") {
  auto p = HyperfineParams::from_constants(-260e6, 1.5, -0.3, 0.01);
  auto h = build_hamiltonian(p);
  CHECK((h - h.transpose()).norm() == 0.0);
  // m_F values per basis slot: 3/2, 1/2, 1/2, -1/2, -1/2, -3/2.
  double mf[6] = {1.5, 0.5, 0.5, -0.5, -0.5, -1.5};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (mf[i] != mf[j]) CHECK(h(i, j) == 0.0);
}

TEST_CASE("zero-field eigenvalues recover the two hyperfine manifolds") {
  auto p = HyperfineParams::from_x(0.0);
  auto states = eigensystem(p);
  // a_hfs = -1: the F = 3/2 manifold sits at a/2 = -0.5 Hz (4 states), the
  // F = 1/2 manifold at -a = +1 Hz (2 states).
  int low = 0, high = 0;
  for (const auto& s : states) {
    if (std::abs(s.energy - (-0.5)) < 1e-12) ++low;
    if (std::abs(s.energy - 1.0) < 1e-12) ++high;
  }
  CHECK(low == 4);
  CHECK(high == 2);
  // Branch +1 states are the lower ones in each mixed block.
  for (const auto& s : states)
    if (s.branch == +1) CHECK(s.energy == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("zero-field mixing reproduces the Clebsch-Gordan weights") {
  CHECK(no_flip_probability(0.5, 0.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(no_flip_probability(-0.5, 0.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("closed-form mixing frozen values") {
  CHECK(no_flip_probability(0.5, 1.0) == doctest::Approx(0.908248290463863).epsilon(1e-13));
  CHECK(no_flip_probability(-0.5, 1.0) == doctest::Approx(0.7886751345948129).epsilon(1e-13));
  CHECK(no_flip_probability(-0.5, 2.5) == doctest::Approx(0.9584746503080888).epsilon(1e-13));
}

TEST_CASE("stretched states never flip") {
  for (double x : {0.0, 0.3, 1.0, 7.0, 500.0}) {
    CHECK(no_flip_probability(1.5, x) == 1.0);
    CHECK(spin_flip_probability(1.5, x) == 0.0);
    // The m_F = -3/2 state is pure nuclear-down; its "no flip" weight on the
    // nuclear-up component is zero by construction.
    CHECK(no_flip_probability(-1.5, x) == 0.0);
  }
}

TEST_CASE("closed form matches numeric diagonalization over a log field grid") {
  for (int i = 0; i <= 60; ++i) {
    double x = std::pow(10.0, -3.0 + 6.0 * i / 60.0);
    auto states = eigensystem(HyperfineParams::from_x(x));
    for (const auto& s : states) {
      if (s.branch != +1) continue;
      if (s.m_f != 0.5 && s.m_f != -0.5) continue;
      auto c = mixing_coefficients(s.m_f, x);
      CHECK(std::abs(s.c_up - c.c_up) < 1e-12);
      CHECK(std::abs(s.c_dn - c.c_dn) < 1e-12);
    }
  }
}

TEST_CASE("upper branch is the mirror of the lower branch") {
  for (double x : {0.02, 0.7, 3.0}) {
    auto states = eigensystem(HyperfineParams::from_x(x));
    for (double mf : {0.5, -0.5}) {
      const ZeemanState *lo = nullptr, *hi = nullptr;
      for (const auto& s : states) {
        if (s.m_f != mf) continue;
        (s.branch == +1 ? lo : hi) = &s;
      }
      REQUIRE(lo != nullptr);
      REQUIRE(hi != nullptr);
      CHECK(lo->energy < hi->energy);
      // Orthogonality of the two block eigenvectors.
      CHECK(lo->c_up == doctest::Approx(hi->c_dn).epsilon(1e-12));
      CHECK(lo->c_dn == doctest::Approx(hi->c_up).epsilon(1e-12));
    }
  }
}

TEST_CASE("high field decouples the nuclear spin") {
  CHECK(no_flip_probability(0.5, 1e4) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(no_flip_probability(-0.5, 1e4) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("95 percent no-flip crossing for the slowest block") {
  // m_F = -1/2 needs the largest field; root frozen from the closed form.
  double xstar = 2.2799903869024836;
  CHECK(no_flip_probability(-0.5, xstar) == doctest::Approx(0.95).epsilon(1e-12));
  CHECK(no_flip_probability(-0.5, xstar - 0.01) < 0.95);
  CHECK(no_flip_probability(-0.5, xstar + 0.01) > 0.95);
  // The m_F = +1/2 block crosses earlier.
  CHECK(no_flip_probability(0.5, 1.6133237202358206) == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("physical constants map to the dimensionless field") {
  auto p = HyperfineParams::from_constants(-260e6, 1.5, -0.3, 0.01);
  CHECK(p.x() == doctest::Approx(0.5382584775907692).epsilon(1e-14));
  // Stretched-state energy is purely diagonal.
  auto states = eigensystem(p);
  CHECK(states[0].m_f == 1.5);
  CHECK(states[0].energy == doctest::Approx(79955107.92979999).epsilon(1e-12));
  // Mixing depends on the field only through x.
  auto c1 = mixing_coefficients(0.5, p.x());
  auto from_x_states = eigensystem(HyperfineParams::from_x(p.x()));
  for (const auto& s : from_x_states)
    if (s.m_f == 0.5 && s.branch == +1) CHECK(s.c_up == doctest::Approx(c1.c_up).epsilon(1e-12));
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS(mixing_coefficients(0.3, 1.0));
  CHECK_THROWS(mixing_coefficients(0.5, -0.1));
  CHECK_THROWS(HyperfineParams::from_constants(0.0, 1.5, 0.0, 0.01));
}
