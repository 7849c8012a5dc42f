#include "pauliblock/zeeman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pauliblock::zeeman {

namespace {

struct BasisState {
  int m_j;
  double m_i;
};

constexpr BasisState basis[6] = {{1, 0.5}, {1, -0.5}, {0, 0.5},
                                 {0, -0.5}, {-1, 0.5}, {-1, -0.5}};

}  // namespace

HyperfineParams HyperfineParams::from_constants(double a_hfs_hz, double g_j, double g_i,
                                                double b_tesla) {
  if (a_hfs_hz == 0.0) throw std::invalid_argument("hyperfine constant must be nonzero");
  HyperfineParams p;
  p.a_hfs = a_hfs_hz;
  p.zeeman_j = g_j * mu_bohr_hz_per_tesla * b_tesla;
  p.zeeman_i = g_i * mu_nuclear_hz_per_tesla * b_tesla;
  return p;
}

HyperfineParams HyperfineParams::from_x(double x) {
  if (x < 0.0) throw std::invalid_argument("x must be >= 0");
  HyperfineParams p;
  p.a_hfs = -1.0;
  p.zeeman_j = 1.5 * x;
  p.zeeman_i = 0.0;
  return p;
}

double HyperfineParams::x() const {
  return 2.0 * (zeeman_j + zeeman_i) / (3.0 * std::abs(a_hfs));
}

Eigen::Matrix<double, 6, 6> build_hamiltonian(const HyperfineParams& p) {
  Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 6; ++i) {
    h(i, i) = p.a_hfs * basis[i].m_j * basis[i].m_i + p.zeeman_j * basis[i].m_j -
              p.zeeman_i * basis[i].m_i;
  }
  // (I_+ J_- + I_- J_+)/2 couples (m_J, -1/2) to (m_J - 1, +1/2) with
  // matrix element (a/2) sqrt(J(J+1) - m_J(m_J - 1)) for I = 1/2.
  for (int i = 0; i < 6; ++i) {
    if (basis[i].m_i != -0.5) continue;
    int mj = basis[i].m_j;
    for (int j = 0; j < 6; ++j) {
      if (basis[j].m_j == mj - 1 && basis[j].m_i == 0.5) {
        double v = 0.5 * p.a_hfs * std::sqrt(2.0 - mj * (mj - 1.0));
        h(i, j) = v;
        h(j, i) = v;
      }
    }
  }
  return h;
}

std::array<ZeemanState, 6> eigensystem(const HyperfineParams& p) {
  Eigen::Matrix<double, 6, 6> h = build_hamiltonian(p);
  std::array<ZeemanState, 6> out;

  // Stretched states: single-entry blocks, index 0 is (1,+), index 5 is (-1,-).
  out[0] = {1.5, +1, h(0, 0), 1.0, 0.0};
  out[5] = {-1.5, +1, h(5, 5), 0.0, 1.0};

  // Mixed blocks, in (up, down) order: m_F = 1/2 pairs (0,+) with (1,-),
  // m_F = -1/2 pairs (-1,+) with (0,-).
  struct Block {
    double m_f;
    int up_idx, dn_idx;
  };
  const Block blocks[2] = {{0.5, 2, 1}, {-0.5, 4, 3}};
  for (int bi = 0; bi < 2; ++bi) {
    const Block& blk = blocks[bi];
    Eigen::Matrix2d m;
    m << h(blk.up_idx, blk.up_idx), h(blk.up_idx, blk.dn_idx),
        h(blk.dn_idx, blk.up_idx), h(blk.dn_idx, blk.dn_idx);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
    for (int k = 0; k < 2; ++k) {  // k = 0 lower, k = 1 upper
      ZeemanState st;
      st.m_f = blk.m_f;
      st.branch = (k == 0) ? +1 : -1;
      st.energy = es.eigenvalues()(k);
      st.c_up = std::abs(es.eigenvectors()(0, k));
      st.c_dn = std::abs(es.eigenvectors()(1, k));
      out[1 + 2 * bi + k] = st;
    }
  }

  // Order by m_f descending, branch +1 first.
  std::array<ZeemanState, 6> ordered;
  int pos = 0;
  for (double mf : {1.5, 0.5, -0.5, -1.5})
    for (int br : {+1, -1})
      for (const auto& st : out)
        if (st.m_f == mf && st.branch == br) ordered[pos++] = st;
  // Stretched blocks contribute one state each.
  return ordered;
}

MixingCoefficients mixing_coefficients(double m_f, double x) {
  if (x < 0.0) throw std::invalid_argument("x must be >= 0");
  if (m_f == 1.5) return {1.0, 0.0};
  if (m_f == -1.5) return {0.0, 1.0};
  if (m_f != 0.5 && m_f != -0.5)
    throw std::invalid_argument("m_f must be one of +-1/2, +-3/2");
  double num = x + (2.0 / 3.0) * m_f;
  double disc = x * x + (4.0 / 3.0) * m_f * x + 1.0;
  double cup2 = 0.5 * (1.0 + num / std::sqrt(disc));
  cup2 = std::clamp(cup2, 0.0, 1.0);
  return {std::sqrt(cup2), std::sqrt(1.0 - cup2)};
}

double no_flip_probability(double m_f, double x) {
  auto c = mixing_coefficients(m_f, x);
  return c.c_up * c.c_up;
}

double spin_flip_probability(double m_f, double x) { return 1.0 - no_flip_probability(m_f, x); }

}  // namespace pauliblock::zeeman
