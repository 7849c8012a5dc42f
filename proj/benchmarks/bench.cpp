#include <benchmark/benchmark.h>

#include "pauliblock/dipole_dipole.hpp"
#include "pauliblock/master_equation.hpp"
#include "pauliblock/photon.hpp"
#include "pauliblock/rates.hpp"
#include "pauliblock/recoil.hpp"

using namespace pauliblock;

namespace {

LambDickeConfig config_1d(double eta) {
  LambDickeConfig cfg;
  cfg.eta = {eta, 0.0, 0.0};
  return cfg;
}

}  // namespace

static void BM_RecoilElement1D(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(recoil::element_1d(n / 2, n, 0.17));
}
BENCHMARK(BM_RecoilElement1D)->Arg(4)->Arg(16)->Arg(64);

static void BM_Rtilde(benchmark::State& state) {
  auto cfg = config_1d(0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        recoil::rtilde({1, 0, 0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 0}, cfg));
}
BENCHMARK(BM_Rtilde);

static void BM_GammaEffGeneral(benchmark::State& state) {
  LambDickeConfig cfg;
  cfg.eta = {0.28, 0.28, 0.28};
  auto ground = rates::InitialMotionalState::ground();
  for (auto _ : state) benchmark::DoNotOptimize(rates::gamma_eff_general(ground, cfg));
}
BENCHMARK(BM_GammaEffGeneral);

static void BM_LaserRecoil(benchmark::State& state) {
  LambDickeConfig cfg;
  cfg.eta = {0.2, 0.2, 0.2};
  for (auto _ : state)
    benchmark::DoNotOptimize(rates::laser_recoil({1.0, 0.0, 0.0}, cfg));
}
BENCHMARK(BM_LaserRecoil);

static void BM_Assemble(benchmark::State& state) {
  auto cfg = config_1d(0.1);
  auto basis =
      me::FermionBasis::pairs({static_cast<int>(state.range(0)), 0, 0}, {0, 1});
  for (auto _ : state) benchmark::DoNotOptimize(me::assemble(cfg, basis));
  state.SetLabel(std::to_string(basis.size()) + " states");
}
BENCHMARK(BM_Assemble)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

static void BM_Evolve(benchmark::State& state) {
  auto cfg = config_1d(0.1);
  auto basis = me::FermionBasis::pairs({3, 0, 0}, {0, 1});
  auto bundle = me::assemble(cfg, basis);
  me::DensityMatrix dm;
  auto psi = me::pure_pair_state(basis, rates::InitialMotionalState::ground());
  dm.rho = psi * psi.adjoint();
  for (auto _ : state)
    benchmark::DoNotOptimize(me::evolve(dm, bundle, {5.0}));
  state.SetLabel("to t = 5 / gamma");
}
BENCHMARK(BM_Evolve)->Unit(benchmark::kMillisecond);

static void BM_PhotonProfile(benchmark::State& state) {
  photon::PhotonScenario s(0.28, 5.0);
  photon::SuperpositionInit init;
  init.mu0 = 1.0 - 0.5 * 0.28 * 0.28;
  init.mu1 = Complex(0.0, std::sqrt(1.0 - std::norm(init.mu0)));
  double t = 10.0 / s.gamma_eff0();
  for (auto _ : state)
    benchmark::DoNotOptimize(photon::profile_along_axis(s, init, t, 1001));
  state.SetLabel("1001 samples");
}
BENCHMARK(BM_PhotonProfile)->Unit(benchmark::kMillisecond);

static void BM_DipoleDipoleElement(benchmark::State& state) {
  LambDickeConfig cfg;
  cfg.eta = {0.28, 0.28, 0.28};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        me::dipole_dipole_element({1, 0, 0}, {0, 0, 0}, {0, 0, 0}, {1, 0, 0}, cfg, 0.01));
}
BENCHMARK(BM_DipoleDipoleElement)->Unit(benchmark::kMillisecond)->Iterations(3);

BENCHMARK_MAIN();
