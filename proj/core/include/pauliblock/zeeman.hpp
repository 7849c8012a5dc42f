#pragma once

#include <Eigen/Dense>
#include <array>

namespace pauliblock::zeeman {

// Hyperfine + Zeeman problem for an excited level with J = 1 and nuclear
// spin I = 1/2 (six states). All energies are in Hz. The Hamiltonian is
//   H/h = a_hfs (I.J)/hbar^2 + zeeman_j m_J - zeeman_i m_I,
// with zeeman_j = g_J mu_B B / h and zeeman_i = g_I mu_N B / h.
// The dimensionless field is x = 2 (zeeman_j + zeeman_i) / (3 |a_hfs|);
// the spin mixing depends on the field only through x.
struct HyperfineParams {
  double a_hfs = -1.0;   // Hz, sign kept
  double zeeman_j = 0.0; // Hz
  double zeeman_i = 0.0; // Hz

  // Physical constants over h, in Hz per tesla.
  static constexpr double mu_bohr_hz_per_tesla = 1.3996244936e10;
  static constexpr double mu_nuclear_hz_per_tesla = 7.6225932e6;

  static HyperfineParams from_constants(double a_hfs_hz, double g_j, double g_i,
                                        double b_tesla);
  // Pure-mixing parametrization: a_hfs = -1 Hz and the whole electronic +
  // nuclear Zeeman shift carried by zeeman_j = 1.5 x.
  static HyperfineParams from_x(double x);

  double x() const;
};

// Basis order (m_J, m_I): (1,+),(1,-),(0,+),(0,-),(-1,+),(-1,-) with
// +/- meaning m_I = +-1/2. Entries in Hz.
Eigen::Matrix<double, 6, 6> build_hamiltonian(const HyperfineParams& p);

// One eigenstate of a single m_F block. branch = +1 labels the lower-energy
// member of each mixed block (the stretched m_F = +-3/2 states are branch
// +1); branch = -1 the upper. c_up and c_dn are the nonnegative weights
// (amplitudes) on the nuclear-up state (m_J = m_F - 1/2, m_I = +1/2) and the
// nuclear-down state (m_J = m_F + 1/2, m_I = -1/2).
struct ZeemanState {
  double m_f = 0.0;
  int branch = +1;
  double energy = 0.0;  // Hz
  double c_up = 0.0;
  double c_dn = 0.0;
};

// All six eigenstates, diagonalized numerically block by block, ordered by
// (m_f descending, branch +1 first).
std::array<ZeemanState, 6> eigensystem(const HyperfineParams& p);

// Closed-form mixing of the branch-(+1) state of block m_f in the x
// parametrization (a_hfs < 0):
//   c_up^2 = 1/2 (1 + (x + 2/3 m_f) / sqrt(x^2 + 4/3 m_f x + 1)).
// m_f = +3/2 gives the pure nuclear-up state; m_f = -3/2 is pure nuclear-down
// (that block's closed form is degenerate at x = 1 and is special-cased).
struct MixingCoefficients {
  double c_up = 0.0;
  double c_dn = 0.0;
};
MixingCoefficients mixing_coefficients(double m_f, double x);

// Probability that spontaneous decay of the branch-(+1) eigenstate leaves
// the nuclear spin unchanged (= c_up^2), and its complement.
double no_flip_probability(double m_f, double x);
double spin_flip_probability(double m_f, double x);

}  // namespace pauliblock::zeeman
