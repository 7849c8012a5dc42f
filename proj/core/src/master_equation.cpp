#include "pauliblock/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pauliblock/recoil.hpp"

namespace pauliblock::me {

namespace {

constexpr Complex I{0.0, 1.0};

// Gram matrix of recoil elements over motional pairs p = (m, n):
//   G[(m,n),(m',n')] = integral dOmega N(khat) conj(R_{mn}) R_{m'n'},
// evaluated on a product sphere rule. Positive semidefinite by construction.
Eigen::MatrixXcd gram_on_grid(const FermionBasis& basis, const LambDickeConfig& cfg,
                              int polar, int azimuthal) {
  const int m_modes = basis.motional_modes();
  const int pairs = m_modes * m_modes;
  const Mode3& n_max = basis.n_max();
  Vec3 dhat = cfg.dipole_unit();

  auto grid = SphericalGrid::product_rule(polar, azimuthal);
  const int q_count = static_cast<int>(grid.nodes.size());

  Eigen::MatrixXcd v(q_count, pairs);
  std::array<Eigen::MatrixXcd, 3> r1d;
  for (int q = 0; q < q_count; ++q) {
    const Vec3& khat = grid.nodes[q];
    for (int j = 0; j < 3; ++j) {
      int dim = n_max[j] + 1;
      r1d[j].resize(dim, dim);
      double kappa = khat[j] * cfg.eta[j];
      for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
          Complex el = recoil::element_1d(a, b, kappa);
          r1d[j](a, b) = el;
          r1d[j](b, a) = el;
        }
    }
    for (int a = 0; a < m_modes; ++a) {
      Mode3 ma = basis.motion_of_rank(a);
      for (int b = 0; b < m_modes; ++b) {
        Mode3 mb = basis.motion_of_rank(b);
        v(q, a * m_modes + b) =
            r1d[0](ma[0], mb[0]) * r1d[1](ma[1], mb[1]) * r1d[2](ma[2], mb[2]);
      }
    }
  }

  Eigen::VectorXd wn(q_count);
  for (int q = 0; q < q_count; ++q)
    wn(q) = grid.weights[q] * recoil::dipole_pattern(grid.nodes[q], dhat);
  return v.adjoint() * wn.asDiagonal() * v;
}

Eigen::MatrixXd build_gram(const FermionBasis& basis, const LambDickeConfig& cfg,
                           const QuadratureOptions& q) {
  int polar = q.polar_order;
  int azimuthal = q.azimuthal_points + (q.azimuthal_points % 2);  // even: pairs +-khat
  Eigen::MatrixXcd prev = gram_on_grid(basis, cfg, polar, azimuthal);
  for (int r = 0; r < q.max_refinements; ++r) {
    polar *= 2;
    azimuthal *= 2;
    Eigen::MatrixXcd cur = gram_on_grid(basis, cfg, polar, azimuthal);
    double diff = (cur - prev).norm();
    double scale = std::max(1.0, cur.norm());
    if (diff <= q.rel_tol * scale) {
      if (cur.imag().cwiseAbs().maxCoeff() > 1e-12)
        throw std::logic_error("recoil Gram matrix has a nonvanishing imaginary part");
      return cur.real();
    }
    prev = cur;
  }
  throw QuadratureError("recoil Gram matrix did not converge under order doubling",
                        prev.norm());
}

std::vector<int> occupied_g(const FermionBasis& basis, const std::vector<int>& occ) {
  std::vector<int> out;
  for (int i : occ)
    if (i < basis.motional_modes()) out.push_back(i);
  return out;
}

std::vector<int> occupied_e(const FermionBasis& basis, const std::vector<int>& occ) {
  std::vector<int> out;
  for (int i : occ)
    if (i >= basis.motional_modes()) out.push_back(i - basis.motional_modes());
  return out;
}

}  // namespace

SuperoperatorBundle assemble(const LambDickeConfig& cfg, const FermionBasis& basis,
                             const DipoleDipoleSpec& dd, const AssembleOptions& opts) {
  cfg.validate();
  const int dim = basis.size();
  const int m_modes = basis.motional_modes();
  auto pair_rank = [m_modes](int a, int b) { return a * m_modes + b; };

  Eigen::MatrixXd gram = build_gram(basis, cfg, opts.quadrature);

  SuperoperatorBundle bundle;
  bundle.gamma = cfg.gamma;
  bundle.h_eff0 = Eigen::MatrixXcd::Zero(dim, dim);
  bundle.h_eff1 = Eigen::MatrixXcd::Zero(dim, dim);

  // Trap energies: sum of nu . n over occupied modes (zero-point offset is a
  // global phase for fixed particle number and is dropped).
  for (int s = 0; s < dim; ++s) {
    double energy = 0.0;
    for (int sp : basis.state(s)) {
      Mode3 motion = basis.mode(sp).motion;
      for (int j = 0; j < 3; ++j) energy += cfg.nu[j] * motion[j];
    }
    bundle.h_eff0(s, s) = energy;
  }

  // Anti-Hermitian part -(i gamma / 2)(N_e - T). The e-number piece is kept
  // at the untruncated rate; T compensates it with the Pauli-blocked overlap.
  for (int s = 0; s < dim; ++s)
    bundle.h_eff1(s, s) -= 0.5 * I * (cfg.gamma * basis.sector(s));

  if (dd.include && !(dd.cutoff > 1e-4 && dd.cutoff < 1.0))
    throw std::invalid_argument("dipole-dipole cutoff must lie in (1e-4, 1)");

  std::map<std::array<Mode3, 4>, double> dd_cache;
  auto dd_element = [&](const Mode3& np, const Mode3& mp, const Mode3& m,
                        const Mode3& n) -> double {
    int total = 0;
    for (int j = 0; j < 3; ++j) total += (np[j] + mp[j] + m[j] + n[j]) % 2;
    if (total != 0) return 0.0;
    std::array<Mode3, 2> first{np, m};
    std::array<Mode3, 2> second{mp, n};
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    std::array<Mode3, 4> key;
    if (second < first) std::swap(first, second);
    key = {first[0], first[1], second[0], second[1]};
    auto it = dd_cache.find(key);
    if (it != dd_cache.end()) return it->second;
    double value =
        dipole_dipole_element(np, mp, m, n, cfg, dd.cutoff, opts.quadrature).value;
    dd_cache.emplace(key, value);
    return value;
  };

  for (int s = 0; s < dim; ++s) {
    const auto& occ = basis.state(s);
    auto e_ranks = occupied_e(basis, occ);
    auto g_ranks = occupied_g(basis, occ);
    if (e_ranks.empty() || g_ranks.empty()) continue;
    for (int nu : e_ranks)
      for (int mu : g_ranks) {
        auto step1 = FermionBasis::annihilate(occ, m_modes + nu);
        auto step2 = FermionBasis::annihilate(step1->second, mu);
        int base_sign = step1->first * step2->first;
        for (int mprime = 0; mprime < m_modes; ++mprime) {
          auto step3 = FermionBasis::create(step2->second, mprime);
          if (!step3) continue;
          for (int nprime = 0; nprime < m_modes; ++nprime) {
            auto step4 = FermionBasis::create(step3->second, m_modes + nprime);
            if (!step4) continue;
            int t = basis.state_index(step4->second);
            if (t < 0) continue;
            double sign = base_sign * step3->first * step4->first;
            double overlap = gram(pair_rank(mu, nprime), pair_rank(mprime, nu));
            bundle.h_eff1(t, s) += 0.5 * I * (cfg.gamma * sign * overlap);
            if (dd.include) {
              Mode3 np3 = basis.motion_of_rank(nprime);
              Mode3 mp3 = basis.motion_of_rank(mprime);
              Mode3 m3 = basis.motion_of_rank(mu);
              Mode3 n3 = basis.motion_of_rank(nu);
              double l = dd_element(np3, mp3, m3, n3);
              bundle.h_eff0(t, s) -= cfg.gamma * sign * l;
            }
          }
        }
      }
  }

  if ((bundle.h_eff0 - bundle.h_eff0.adjoint()).norm() > 1e-10 * std::max(1.0, bundle.h_eff0.norm()))
    throw std::logic_error("Hermitian part failed its symmetry check");

  bundle.h_eff = bundle.h_eff0 + bundle.h_eff1;

  // Recycling kernel K = gamma G over motional pairs, decomposed into
  // orthogonal decay channels.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  double lambda_max = es.eigenvalues().maxCoeff();
  if (lambda_max < 0.0) throw std::logic_error("recoil Gram matrix has no positive weight");
  if (es.eigenvalues().minCoeff() < -opts.kernel_negativity_tol * lambda_max) {
    std::ostringstream msg;
    msg << "recycling kernel indefinite: min eigenvalue "
        << es.eigenvalues().minCoeff() << " vs max " << lambda_max;
    throw std::logic_error(msg.str());
  }

  // Sparse patterns of c^dag_{g a} c_{e b} for every motional pair.
  std::vector<std::vector<Eigen::Triplet<double>>> pair_ops(m_modes * m_modes);
  for (int s = 0; s < dim; ++s) {
    const auto& occ = basis.state(s);
    for (int b : occupied_e(basis, occ)) {
      auto step1 = FermionBasis::annihilate(occ, m_modes + b);
      for (int a = 0; a < m_modes; ++a) {
        auto step2 = FermionBasis::create(step1->second, a);
        if (!step2) continue;
        int t = basis.state_index(step2->second);
        if (t < 0) continue;
        pair_ops[pair_rank(a, b)].emplace_back(t, s, step1->first * step2->first);
      }
    }
  }

  for (int k = es.eigenvalues().size() - 1; k >= 0; --k) {
    double lambda = es.eigenvalues()(k);
    if (lambda < opts.channel_weight_floor * lambda_max) break;
    std::vector<Eigen::Triplet<double>> triplets;
    for (int p = 0; p < m_modes * m_modes; ++p) {
      double u = es.eigenvectors()(p, k);
      if (u == 0.0) continue;
      for (const auto& tr : pair_ops[p])
        triplets.emplace_back(tr.row(), tr.col(), u * tr.value());
    }
    JumpChannel ch;
    ch.op.resize(dim, dim);
    ch.op.setFromTriplets(triplets.begin(), triplets.end());
    ch.op.prune(1e-15, 1.0);
    ch.weight = cfg.gamma * lambda;
    bundle.jump_channels.push_back(std::move(ch));
  }
  bundle.kernel_rank = static_cast<int>(bundle.jump_channels.size());

  double max_deficit = 0.0;
  for (int b = 0; b < m_modes; ++b) {
    double covered = 0.0;
    for (int a = 0; a < m_modes; ++a)
      covered += gram(pair_rank(a, b), pair_rank(a, b));
    max_deficit = std::max(max_deficit, 1.0 - covered);
  }
  bundle.completeness_deficit = max_deficit;

  return bundle;
}

Eigen::VectorXcd pure_pair_state(const FermionBasis& basis,
                                 const rates::InitialMotionalState& state) {
  if (basis.particle_count() != 2)
    throw std::invalid_argument("pure_pair_state needs a two-particle basis");
  state.validate();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.size());
  int g_idx = basis.mode_index(Internal::g, state.blocking_mode);
  for (const auto& [mode, amp] : state.amplitudes) {
    int e_idx = basis.mode_index(Internal::e, mode);
    std::vector<int> occ{g_idx, e_idx};  // g block precedes e block
    int idx = basis.state_index(occ);
    if (idx < 0) throw std::invalid_argument("initial state outside the basis sectors");
    psi(idx) = amp;
  }
  double n = psi.norm();
  if (n == 0.0) throw std::invalid_argument("initial state has zero norm in this basis");
  return psi / n;
}

Eigen::VectorXcd pure_single_state(const FermionBasis& basis,
                                   const rates::InitialMotionalState& state) {
  if (basis.particle_count() != 1)
    throw std::invalid_argument("pure_single_state needs a one-particle basis");
  state.validate();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.size());
  for (const auto& [mode, amp] : state.amplitudes) {
    int idx = basis.state_index({basis.mode_index(Internal::e, mode)});
    if (idx < 0) throw std::invalid_argument("initial state outside the basis");
    psi(idx) = amp;
  }
  double n = psi.norm();
  if (n == 0.0) throw std::invalid_argument("initial state has zero norm in this basis");
  return psi / n;
}

namespace {

struct Derivative {
  const Eigen::MatrixXcd& h;
  Eigen::MatrixXcd h_dag;
  std::vector<Eigen::SparseMatrix<Complex>> jumps;
  std::vector<double> weights;

  explicit Derivative(const SuperoperatorBundle& bundle) : h(bundle.h_eff) {
    h_dag = bundle.h_eff.adjoint();
    for (const auto& ch : bundle.jump_channels) {
      jumps.push_back(ch.op.cast<Complex>());
      weights.push_back(ch.weight);
    }
  }

  Eigen::MatrixXcd operator()(const Eigen::MatrixXcd& rho) const {
    Eigen::MatrixXcd out = -I * (h * rho - rho * h_dag);
    for (size_t a = 0; a < jumps.size(); ++a) {
      Eigen::MatrixXcd jr = jumps[a] * rho;
      out.noalias() += weights[a] * (jr * jumps[a].adjoint());
    }
    return out;
  }
};

}  // namespace

std::vector<DensityMatrix> evolve(const DensityMatrix& state,
                                  const SuperoperatorBundle& bundle,
                                  const std::vector<double>& snapshot_times,
                                  const EvolveOptions& opts) {
  const int dim = static_cast<int>(bundle.h_eff.rows());
  if (state.rho.rows() != dim || state.rho.cols() != dim)
    throw std::invalid_argument("density matrix dimension does not match the bundle");
  if (snapshot_times.empty()) throw std::invalid_argument("no snapshot times given");
  for (size_t i = 0; i < snapshot_times.size(); ++i) {
    if (snapshot_times[i] < 0.0)
      throw std::invalid_argument("snapshot times must be nonnegative");
    if (i > 0 && snapshot_times[i] <= snapshot_times[i - 1])
      throw std::invalid_argument("snapshot times must be strictly ascending");
  }

  Derivative deriv(bundle);

  // Dormand-Prince 5(4) coefficients.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                   b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - b* difference for the embedded 4th-order error estimate.
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  Eigen::MatrixXcd rho = state.rho;
  double t = 0.0;
  double t_end = snapshot_times.back();
  double h = std::min(1e-3, t_end / 10.0);
  if (h <= 0.0) h = 1e-3;

  Eigen::MatrixXcd k1 = deriv(rho);
  std::vector<DensityMatrix> out;
  out.reserve(snapshot_times.size());
  size_t next_snap = 0;

  auto record = [&](double time_now) {
    while (next_snap < snapshot_times.size() &&
           std::abs(snapshot_times[next_snap] - time_now) <=
               1e-12 * std::max(1.0, std::abs(time_now))) {
      if (opts.check_positivity) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
        double min_ev = es.eigenvalues().minCoeff();
        if (min_ev < -opts.positivity_abort) {
          std::ostringstream msg;
          msg << "density matrix lost positivity at t = " << state.time + time_now
              << ": min eigenvalue " << min_ev;
          throw std::runtime_error(msg.str());
        }
      }
      out.push_back({rho, state.time + snapshot_times[next_snap]});
      ++next_snap;
    }
  };

  record(0.0);

  long long steps = 0;
  while (next_snap < snapshot_times.size()) {
    double target = snapshot_times[next_snap];
    double h_try = std::min(h, target - t);

    Eigen::MatrixXcd k2 = deriv(rho + h_try * (a21 * k1));
    Eigen::MatrixXcd k3 = deriv(rho + h_try * (a31 * k1 + a32 * k2));
    Eigen::MatrixXcd k4 = deriv(rho + h_try * (a41 * k1 + a42 * k2 + a43 * k3));
    Eigen::MatrixXcd k5 = deriv(rho + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Eigen::MatrixXcd k6 =
        deriv(rho + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Eigen::MatrixXcd rho5 =
        rho + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Eigen::MatrixXcd k7 = deriv(rho5);

    double err = (h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).norm();
    double tol = opts.abs_tol + opts.rel_tol * rho.norm();

    if (err <= tol) {
      t += h_try;
      // Land exactly on the snapshot despite floating accumulation.
      if (std::abs(target - t) <= 1e-12 * std::max(1.0, std::abs(target))) t = target;
      rho = 0.5 * (rho5 + rho5.adjoint().eval());
      k1 = k7;  // first-same-as-last
      record(t);
    }

    double factor = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h = h_try * std::clamp(factor, 0.2, 5.0);
    if (!(h > 1e-14 * std::max(1.0, t_end)))
      throw std::runtime_error("time step underflow in evolve");
    if (++steps > 50'000'000) throw std::runtime_error("step budget exhausted in evolve");
  }

  return out;
}

Observables observables(const DensityMatrix& state, const FermionBasis& basis) {
  const int dim = basis.size();
  if (state.rho.rows() != dim)
    throw std::invalid_argument("density matrix dimension does not match the basis");
  Observables obs;
  obs.mode_occupation.assign(2 * basis.motional_modes(), 0.0);
  for (int s = 0; s < dim; ++s) {
    double p = state.rho(s, s).real();
    obs.trace += p;
    int sec = basis.sector(s);
    obs.p_excited += sec * p;
    obs.sector_population[sec] += p;
    for (int sp : basis.state(s)) {
      obs.mode_occupation[sp] += p;
      Mode3 motion = basis.mode(sp).motion;
      for (int j = 0; j < 3; ++j) obs.motional_occupation[j] += motion[j] * p;
    }
  }
  return obs;
}

}  // namespace pauliblock::me
