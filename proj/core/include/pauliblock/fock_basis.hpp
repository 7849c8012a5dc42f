#pragma once

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "pauliblock/types.hpp"

namespace pauliblock::me {

enum class Internal { g = 0, e = 1 };

struct SingleParticleMode {
  Internal internal;
  Mode3 motion;
};

// Occupation-number basis for one or two identical fermions distributed over
// internal states {g, e} and motional number states 0..n_max per axis.
// Single-particle modes are indexed with all g modes first, then all e
// modes, motional indices ranked lexicographically. A basis state is the
// ascending list of occupied single-particle indices, representing
// c^dag_{i1} c^dag_{i2} ... |vac> with i1 < i2 < ...
//
// Fermionic sign bookkeeping: annihilating the k-th occupied mode (0-based
// position) contributes (-1)^k; creating contributes (-1)^(number of
// occupied modes below the new index).
class FermionBasis {
 public:
  // Two-particle basis, optionally restricted to given excitation counts
  // (number of occupied e modes, 0..2).
  static FermionBasis pairs(const Mode3& n_max, const std::set<int>& sectors = {0, 1, 2});
  // One-particle basis over the same mode set (sectors 0 and 1).
  static FermionBasis single(const Mode3& n_max);

  int size() const { return static_cast<int>(states_.size()); }
  int particle_count() const { return particle_count_; }
  const Mode3& n_max() const { return n_max_; }
  int motional_modes() const { return m_; }

  // Number of occupied e modes in state idx.
  int sector(int idx) const;
  const std::vector<int>& state(int idx) const { return states_[idx]; }
  // -1 when the occupation list is not in the basis.
  int state_index(const std::vector<int>& occ) const;

  int mode_index(Internal internal, const Mode3& motion) const;
  SingleParticleMode mode(int sp_index) const;
  int motional_rank(const Mode3& motion) const;
  Mode3 motion_of_rank(int rank) const;

  // Fermionic ladder operators on occupation lists; nullopt when the result
  // vanishes. The int is the accumulated sign, +1 or -1.
  static std::optional<std::pair<int, std::vector<int>>> annihilate(
      const std::vector<int>& occ, int sp_index);
  static std::optional<std::pair<int, std::vector<int>>> create(
      const std::vector<int>& occ, int sp_index);

 private:
  FermionBasis() = default;

  Mode3 n_max_{0, 0, 0};
  int m_ = 0;  // motional modes per internal state
  int particle_count_ = 0;
  std::vector<std::vector<int>> states_;
  std::vector<int> sector_of_;
  // Lookup from occupation list to index, states_ kept sorted for binary search.
};

}  // namespace pauliblock::me
