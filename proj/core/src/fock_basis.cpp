#include "pauliblock/fock_basis.hpp"

#include <algorithm>
#include <stdexcept>

namespace pauliblock::me {

namespace {

int checked_motional_count(const Mode3& n_max) {
  long long m = 1;
  for (int j = 0; j < 3; ++j) {
    if (n_max[j] < 0) throw std::invalid_argument("n_max components must be >= 0");
    m *= n_max[j] + 1;
  }
  if (2 * m > 200)
    throw std::invalid_argument("basis too large: more than 200 single-particle modes");
  return static_cast<int>(m);
}

}  // namespace

FermionBasis FermionBasis::pairs(const Mode3& n_max, const std::set<int>& sectors) {
  for (int s : sectors)
    if (s < 0 || s > 2) throw std::invalid_argument("pair sectors must be within 0..2");
  if (sectors.empty()) throw std::invalid_argument("at least one sector required");
  FermionBasis b;
  b.n_max_ = n_max;
  b.m_ = checked_motional_count(n_max);
  b.particle_count_ = 2;
  int total = 2 * b.m_;
  for (int i = 0; i < total; ++i)
    for (int j = i + 1; j < total; ++j) {
      int sec = (i >= b.m_ ? 1 : 0) + (j >= b.m_ ? 1 : 0);
      if (!sectors.count(sec)) continue;
      b.states_.push_back({i, j});
      b.sector_of_.push_back(sec);
    }
  return b;
}

FermionBasis FermionBasis::single(const Mode3& n_max) {
  FermionBasis b;
  b.n_max_ = n_max;
  b.m_ = checked_motional_count(n_max);
  b.particle_count_ = 1;
  for (int i = 0; i < 2 * b.m_; ++i) {
    b.states_.push_back({i});
    b.sector_of_.push_back(i >= b.m_ ? 1 : 0);
  }
  return b;
}

int FermionBasis::sector(int idx) const { return sector_of_.at(idx); }

int FermionBasis::state_index(const std::vector<int>& occ) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), occ);
  if (it == states_.end() || *it != occ) return -1;
  return static_cast<int>(it - states_.begin());
}

int FermionBasis::motional_rank(const Mode3& motion) const {
  for (int j = 0; j < 3; ++j)
    if (motion[j] < 0 || motion[j] > n_max_[j])
      throw std::out_of_range("motional index outside basis");
  return (motion[0] * (n_max_[1] + 1) + motion[1]) * (n_max_[2] + 1) + motion[2];
}

Mode3 FermionBasis::motion_of_rank(int rank) const {
  if (rank < 0 || rank >= m_) throw std::out_of_range("motional rank outside basis");
  Mode3 motion;
  motion[2] = rank % (n_max_[2] + 1);
  rank /= n_max_[2] + 1;
  motion[1] = rank % (n_max_[1] + 1);
  motion[0] = rank / (n_max_[1] + 1);
  return motion;
}

int FermionBasis::mode_index(Internal internal, const Mode3& motion) const {
  return (internal == Internal::e ? m_ : 0) + motional_rank(motion);
}

SingleParticleMode FermionBasis::mode(int sp_index) const {
  if (sp_index < 0 || sp_index >= 2 * m_)
    throw std::out_of_range("single-particle index outside basis");
  SingleParticleMode m;
  m.internal = sp_index >= m_ ? Internal::e : Internal::g;
  m.motion = motion_of_rank(sp_index % m_);
  return m;
}

std::optional<std::pair<int, std::vector<int>>> FermionBasis::annihilate(
    const std::vector<int>& occ, int sp_index) {
  auto it = std::lower_bound(occ.begin(), occ.end(), sp_index);
  if (it == occ.end() || *it != sp_index) return std::nullopt;
  int sign = (it - occ.begin()) % 2 == 0 ? 1 : -1;
  std::vector<int> out(occ.begin(), it);
  out.insert(out.end(), it + 1, occ.end());
  return std::make_pair(sign, std::move(out));
}

std::optional<std::pair<int, std::vector<int>>> FermionBasis::create(
    const std::vector<int>& occ, int sp_index) {
  auto it = std::lower_bound(occ.begin(), occ.end(), sp_index);
  if (it != occ.end() && *it == sp_index) return std::nullopt;
  int sign = (it - occ.begin()) % 2 == 0 ? 1 : -1;
  std::vector<int> out(occ.begin(), it);
  out.push_back(sp_index);
  out.insert(out.end(), it, occ.end());
  return std::make_pair(sign, std::move(out));
}

}  // namespace pauliblock::me
