#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <map>
#include <vector>

#include "pauliblock/dipole_dipole.hpp"
#include "pauliblock/fock_basis.hpp"
#include "pauliblock/quadrature.hpp"
#include "pauliblock/rates.hpp"
#include "pauliblock/types.hpp"

namespace pauliblock::me {

struct DipoleDipoleSpec {
  bool include = false;
  double cutoff = 0.01;
};

// One decay channel of the recycling dissipator: D[rho] contains
// weight * op rho op^T. op is a real combination of c^dag_g c_e strings.
struct JumpChannel {
  Eigen::SparseMatrix<double> op;
  double weight = 0.0;
};

// Generator of the open-system dynamics over a FermionBasis:
//   drho/dt = -i (h_eff rho - rho h_eff^dag) + sum_a weight_a op_a rho op_a^T.
// h_eff = h_eff0 + h_eff1 with h_eff0 the Hermitian part (trap motion plus
// the optional dipole-dipole exchange) and h_eff1 the anti-Hermitian decay
// part -(i gamma / 2)(N_e - T), T the Pauli two-body compensation built from
// the recoil overlap integrals.
//
// The e-counting piece keeps the full free-space rate while the jump
// channels live in the truncated motional basis, so truncation can only
// lower the trace; completeness_deficit bounds that leak per decay.
struct SuperoperatorBundle {
  Eigen::MatrixXcd h_eff;
  Eigen::MatrixXcd h_eff0;
  Eigen::MatrixXcd h_eff1;
  std::vector<JumpChannel> jump_channels;
  double completeness_deficit = 0.0;
  int kernel_rank = 0;
  double gamma = 1.0;
};

struct AssembleOptions {
  QuadratureOptions quadrature;
  // Channels below floor * (largest kernel eigenvalue) are dropped.
  double channel_weight_floor = 1e-14;
  // Kernel eigenvalues below -tol * (largest eigenvalue) abort assembly.
  double kernel_negativity_tol = 1e-10;
};

SuperoperatorBundle assemble(const LambDickeConfig& cfg, const FermionBasis& basis,
                             const DipoleDipoleSpec& dd = {},
                             const AssembleOptions& opts = {});

struct DensityMatrix {
  Eigen::MatrixXcd rho;
  double time = 0.0;
};

// Two-particle pure state with the spectator in state.blocking_mode (ground
// internal state) and the excited atom spread over state.amplitudes:
// sum_n r_n c^dag_{g b} c^dag_{e n} |vac>, normalized.
Eigen::VectorXcd pure_pair_state(const FermionBasis& basis,
                                 const rates::InitialMotionalState& state);

// One-particle excited state sum_n r_n c^dag_{e n} |vac> for a single basis.
Eigen::VectorXcd pure_single_state(const FermionBasis& basis,
                                   const rates::InitialMotionalState& state);

struct EvolveOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  // Snapshot eigenvalues below -positivity_abort stop the run.
  double positivity_abort = 1e-6;
  bool check_positivity = true;
};

// Adaptive embedded Runge-Kutta 5(4) propagation, returning the density
// matrix at each requested time (ascending, relative to state.time).
std::vector<DensityMatrix> evolve(const DensityMatrix& state,
                                  const SuperoperatorBundle& bundle,
                                  const std::vector<double>& snapshot_times,
                                  const EvolveOptions& opts = {});

struct Observables {
  double p_excited = 0.0;  // expected number of excited atoms
  double trace = 0.0;
  std::array<double, 3> sector_population{0.0, 0.0, 0.0};
  std::vector<double> mode_occupation;  // per single-particle index
  Vec3 motional_occupation{0.0, 0.0, 0.0};  // expected total quanta per axis
};

Observables observables(const DensityMatrix& state, const FermionBasis& basis);

}  // namespace pauliblock::me
