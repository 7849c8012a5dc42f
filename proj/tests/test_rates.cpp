#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "pauliblock/rates.hpp"
#include "pauliblock/recoil.hpp"

using namespace pauliblock;
using namespace pauliblock::rates;
using test_helpers::random_unit_vec;

TEST_CASE("unblocked decay keeps the free-space rate exactly") {
  CHECK(gamma_eff_1d(0.28, 0.0, false) == 1.0);
  LambDickeConfig cfg;
  cfg.eta = {0.28, 0.28, 0.28};
  cfg.gamma = 2.5;
  auto s = InitialMotionalState::ground();
  s.blocking_present = false;
  CHECK(gamma_eff_general(s, cfg) == 2.5);
}

TEST_CASE("1D blocked rate frozen reference values") {
  CHECK(gamma_eff_1d(0.28, 0.0, true) ==
        doctest::Approx(0.030584790666088945).epsilon(1e-11));
  CHECK(gamma_eff_1d(0.28, 1.0, true) ==
        doctest::Approx(0.015420353336856471).epsilon(1e-11));
  CHECK(gamma_eff_1d(0.1, 0.6, true) ==
        doctest::Approx(0.00327025170115559).epsilon(1e-11));
  CHECK(gamma_eff_1d(0.0, 0.3, true) == doctest::Approx(0.0));
}

TEST_CASE("isotropic ground pair reduces to the closed identity") {
  for (double eta : {0.05, 0.1, 0.2, 0.28}) {
    LambDickeConfig cfg;
    cfg.eta = {eta, eta, eta};
    double v = gamma_eff_general(InitialMotionalState::ground(), cfg);
    CHECK(v == doctest::Approx(1.0 - std::exp(-eta * eta)).epsilon(1e-12));
  }
}

TEST_CASE("closed identity is dipole-orientation independent") {
  LambDickeConfig cfg;
  cfg.eta = {0.15, 0.15, 0.15};
  double ref = 1.0 - std::exp(-0.15 * 0.15);
  for (int trial = 0; trial < 5; ++trial) {
    cfg.dipole = random_unit_vec();
    CHECK(gamma_eff_general(InitialMotionalState::ground(), cfg) ==
          doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("laser recoil state is normalized and mode-resolved") {
  LambDickeConfig cfg;
  cfg.eta = {0.2, 0.2, 0.2};
  auto s = laser_recoil({0.0, 0.0, 1.0}, cfg);
  double n2 = 0.0;
  for (const auto& [mode, amp] : s.amplitudes) n2 += std::norm(amp);
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
  // Single-axis kick populates only z modes; weight is Poissonian in kappa^2.
  double k2 = 0.04;
  CHECK(std::norm(s.amplitudes.at({0, 0, 0})) == doctest::Approx(std::exp(-k2)).epsilon(1e-12));
  CHECK(std::norm(s.amplitudes.at({0, 0, 1})) ==
        doctest::Approx(k2 * std::exp(-k2)).epsilon(1e-12));
  CHECK(s.amplitudes.count({1, 0, 0}) == 0);
}

TEST_CASE("laser-kicked pair matches the displaced-wavepacket rate") {
  // Frozen from a dense independent quadrature of
  // 1 - integral N(khat) exp(-eta^2 |khat - khat_L|^2) dOmega.
  LambDickeConfig cfg;
  cfg.eta = {0.1, 0.1, 0.1};
  double v = gamma_eff_general(laser_recoil({0.0, 0.0, 1.0}, cfg), cfg);
  CHECK(v == doctest::Approx(0.019762118186168354).epsilon(1e-9));

  LambDickeConfig cfg2;
  cfg2.eta = {0.2, 0.2, 0.2};
  double s3 = 1.0 / std::sqrt(3.0);
  double v2 = gamma_eff_general(laser_recoil({s3, s3, s3}, cfg2), cfg2);
  CHECK(v2 == doctest::Approx(0.07589868103880748).epsilon(1e-9));
}

TEST_CASE("laser-kicked rate follows 2 eta^2 with an O(eta^4) deviation") {
  for (double eta : {0.05, 0.1, 0.2}) {
    LambDickeConfig cfg;
    cfg.eta = {eta, eta, eta};
    double v = gamma_eff_general(laser_recoil({0.0, 0.0, 1.0}, cfg), cfg);
    double dev = std::abs(v - 2.0 * eta * eta);
    CHECK(dev < 3.5 * std::pow(eta, 4));
    CHECK(dev > 1.0 * std::pow(eta, 4));
  }
}

TEST_CASE("validation rejects malformed states") {
  InitialMotionalState s;
  CHECK_THROWS(s.validate());
  s.amplitudes[{0, 0, 0}] = 0.5;  // not normalized
  CHECK_THROWS(s.validate());
  s.amplitudes[{0, 0, 0}] = 1.0;
  CHECK_NOTHROW(s.validate());
  LambDickeConfig cfg;
  CHECK_THROWS(laser_recoil({0.0, 0.0, 2.0}, cfg));
}

TEST_CASE("quench rate reproduces the dressed-decay benchmark") {
  QuenchConfig q;
  q.omega_dr = 4e6;
  q.gamma_1p = 2.0 * std::numbers::pi * 29e6;
  q.delta_dr = 10.0 * q.gamma_1p;
  auto r = quench_rate(q);
  CHECK(r.rate == doctest::Approx(219.52405943709704).epsilon(1e-12));
  CHECK_FALSE(r.adiabatic_warning);
  q.delta_dr = 3.0 * q.gamma_1p;
  CHECK(quench_rate(q).adiabatic_warning);
}

TEST_CASE("quench total rate combines blocked and open spin channels") {
  QuenchConfig q;
  q.omega_dr = 4e6;
  q.gamma_1p = 2.0 * std::numbers::pi * 29e6;
  q.delta_dr = 10.0 * q.gamma_1p;
  q.eta = 0.28;
  q.eta_dr = 0.09;
  q.c_up_sq = 2.0 / 3.0;
  q.c_dn_sq = 1.0 / 3.0;
  CHECK(quench_gamma_total(q) == doctest::Approx(85.83390723990495).epsilon(1e-12));
  // Pure spin-up with full blocking: only the Lamb-Dicke leak survives.
  q.c_up_sq = 1.0;
  q.c_dn_sq = 0.0;
  CHECK(quench_gamma_total(q) ==
        doctest::Approx((0.28 * 0.28 + 0.09 * 0.09) * 219.52405943709704).epsilon(1e-12));
}

TEST_CASE("rate-equation solution conserves population and obeys limits") {
  QuenchConfig q;
  q.omega_dr = 4e6;
  q.gamma_1p = 2.0 * std::numbers::pi * 29e6;
  q.delta_dr = 10.0 * q.gamma_1p;
  q.eta = 0.28;
  q.eta_dr = 0.09;
  q.c_up_sq = 2.0 / 3.0;
  q.c_dn_sq = 1.0 / 3.0;

  auto p0 = rate_equation_solution(q, 0.0);
  CHECK(p0.p_e_up == doctest::Approx(1.0));
  CHECK(p0.p_g_up == doctest::Approx(0.0));

  double gtot = quench_gamma_total(q);
  for (double t : {1e-4, 1e-3, 1e-2, 0.1}) {
    auto p = rate_equation_solution(q, t);
    CHECK(p.p_e_up + p.p_g_up + p.p_g_dn == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.p_e_up == doctest::Approx(std::exp(-gtot * t)).epsilon(1e-12));
    CHECK(p.p_g_up >= 0.0);
    CHECK(p.p_g_dn >= 0.0);
  }
  // Long-time branching: open channel dominates 1 : blocked ratio.
  auto pl = rate_equation_solution(q, 1e3);
  double g_up = q.c_up_sq * (q.eta * q.eta + q.eta_dr * q.eta_dr) * 219.52405943709704;
  double g_dn = q.c_dn_sq * 219.52405943709704;
  CHECK(pl.p_g_up == doctest::Approx(g_up / (g_up + g_dn)).epsilon(1e-9));
  CHECK(pl.p_g_dn == doctest::Approx(g_dn / (g_up + g_dn)).epsilon(1e-9));
}
