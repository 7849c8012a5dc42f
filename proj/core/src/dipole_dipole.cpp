#include "pauliblock/dipole_dipole.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pauliblock::me {

namespace {

// Orthonormal oscillator eigenfunctions phi_0..k_max at xi, by the stable
// normalized recurrence phi_k = xi sqrt(2/k) phi_{k-1} - sqrt((k-1)/k) phi_{k-2}.
void hermite_functions(int k_max, double xi, std::vector<double>& out) {
  out.resize(k_max + 1);
  constexpr double pi_quarter = 0.7511255444649425;  // pi^{-1/4}
  out[0] = pi_quarter * std::exp(-0.5 * xi * xi);
  if (k_max == 0) return;
  out[1] = std::sqrt(2.0) * xi * out[0];
  for (int k = 2; k <= k_max; ++k)
    out[k] = xi * std::sqrt(2.0 / k) * out[k - 1] - std::sqrt((k - 1.0) / k) * out[k - 2];
}

// Tabulated pair-overlap profile along one axis:
//   F(s) = integral dY psi_np psi_m (Y + s/2) psi_mp psi_n (Y - s/2),
// oscillator length ltil = sqrt(2) eta. Even or odd in s by total parity.
struct AxisProfile {
  std::vector<double> values;  // uniform grid on [0, s_max]
  double step = 0.0;
  bool odd = false;

  double operator()(double s) const {
    double a = std::abs(s) / step;
    auto n = static_cast<long>(a);
    long last = static_cast<long>(values.size()) - 1;
    double v;
    if (n >= last) {
      v = 0.0;
    } else if (n == 0 || n + 2 > last) {
      double f = a - n;
      v = values[n] * (1.0 - f) + values[n + 1] * f;
    } else {
      // Four-point Lagrange cubic through the surrounding samples; exact for
      // cubics, so the tabulation error drops as the fourth power of the step.
      double f = a - n;
      double p0 = values[n - 1], p1 = values[n], p2 = values[n + 1], p3 = values[n + 2];
      v = -f * (f - 1.0) * (f - 2.0) / 6.0 * p0 + (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0 * p1 -
          (f + 1.0) * f * (f - 2.0) / 2.0 * p2 + (f + 1.0) * f * (f - 1.0) / 6.0 * p3;
    }
    if (odd && s < 0.0) v = -v;
    return v;
  }
};

AxisProfile tabulate_axis(int np, int m, int mp, int n, double eta, double s_max,
                          int samples, int y_nodes) {
  AxisProfile prof;
  prof.odd = (np + m + mp + n) % 2 != 0;
  prof.step = s_max / (samples - 1);
  prof.values.resize(samples);

  double ltil = std::sqrt(2.0) * eta;
  int k_max = std::max({np, m, mp, n});
  double xi_max = 9.0 + std::sqrt(2.0 * k_max + 1.0);
  auto gl = gauss_legendre(y_nodes);

  std::vector<double> phi_u, phi_v;
  for (int i = 0; i < samples; ++i) {
    double sigma = (i * prof.step) / ltil;
    double acc = 0.0;
    for (const auto& node : gl) {
      double xi = node.x * xi_max;
      hermite_functions(k_max, xi + 0.5 * sigma, phi_u);
      hermite_functions(k_max, xi - 0.5 * sigma, phi_v);
      acc += node.w * phi_u[np] * phi_u[m] * phi_v[mp] * phi_v[n];
    }
    prof.values[i] = acc * xi_max / ltil;
  }
  return prof;
}

double radial_angular(const std::array<AxisProfile, 3>& prof, const Vec3& dhat,
                      double r_lo, double r_hi, int radial_nodes, int polar, int azimuthal) {
  auto grid = SphericalGrid::product_rule(polar, azimuthal);
  std::vector<double> ang_w(grid.nodes.size());
  for (size_t q = 0; q < grid.nodes.size(); ++q) {
    double c = dot(dhat, grid.nodes[q]);
    ang_w[q] = (1.0 - 3.0 * c * c) * grid.weights[q];
  }
  auto gl = gauss_legendre(radial_nodes);
  double la = std::log(r_lo), lb = std::log(r_hi);
  double mid = 0.5 * (la + lb), half = 0.5 * (lb - la);
  double total = 0.0;
  for (const auto& rn : gl) {
    double r = std::exp(mid + half * rn.x);
    double shell = 0.0;
    for (size_t q = 0; q < grid.nodes.size(); ++q) {
      const Vec3& khat = grid.nodes[q];
      shell += ang_w[q] * prof[0](r * khat[0]) * prof[1](r * khat[1]) * prof[2](r * khat[2]);
    }
    total += rn.w * half * shell;
  }
  return 0.75 * total;
}

}  // namespace

DipoleDipoleElement dipole_dipole_element(const Mode3& np, const Mode3& mp, const Mode3& m,
                                          const Mode3& n, const LambDickeConfig& cfg,
                                          double cutoff, const QuadratureOptions& opts) {
  cfg.validate();
  if (!(cutoff > 1e-4 && cutoff < 1.0))
    throw std::invalid_argument("dipole-dipole cutoff must lie in (1e-4, 1)");
  for (int j = 0; j < 3; ++j) {
    if (!(cfg.eta[j] > 0.0))
      throw std::invalid_argument("dipole-dipole integral needs eta > 0 on every axis");
    if (np[j] < 0 || mp[j] < 0 || m[j] < 0 || n[j] < 0)
      throw std::invalid_argument("negative motional index");
  }

  // Odd per-axis parity makes the axis profile odd and the full integral
  // vanish after the even angular average.
  for (int j = 0; j < 3; ++j)
    if ((np[j] + mp[j] + m[j] + n[j]) % 2 != 0) return {0.0, 0.0};

  double ltil_max = 0.0;
  int n_tot = 0;
  for (int j = 0; j < 3; ++j) {
    ltil_max = std::max(ltil_max, std::sqrt(2.0) * cfg.eta[j]);
    n_tot = std::max(n_tot, std::max(np[j] + m[j], mp[j] + n[j]));
  }
  double r_max = ltil_max * (14.0 + 2.0 * std::sqrt(2.0 * n_tot + 1.0));
  double eta_min = std::min({cfg.eta[0], cfg.eta[1], cfg.eta[2]});
  double r_lo = cutoff * eta_min;

  auto evaluate = [&](double lo, int samples, int y_nodes, int radial, int polar,
                      int azimuthal) {
    std::array<AxisProfile, 3> prof;
    for (int j = 0; j < 3; ++j)
      prof[j] = tabulate_axis(np[j], m[j], mp[j], n[j], cfg.eta[j], r_max, samples, y_nodes);
    return radial_angular(prof, cfg.dipole_unit(), lo, r_max, radial, polar, azimuthal);
  };

  double tol = std::max(1e-7, opts.rel_tol);
  int samples = 8193, y_nodes = 72, radial = 96;
  int polar = std::max(32, opts.polar_order);
  int azimuthal = std::max(64, opts.azimuthal_points);
  double coarse = evaluate(r_lo, samples, y_nodes, radial, polar, azimuthal);
  double fine = 0.0;
  bool converged = false;
  for (int refine = 0; refine < std::max(1, opts.max_refinements); ++refine) {
    fine = evaluate(r_lo, 2 * samples - 1, y_nodes + 24, 2 * radial, 2 * polar,
                    2 * azimuthal);
    if (std::abs(fine - coarse) <= tol * std::max(1.0, std::abs(fine))) {
      converged = true;
      break;
    }
    samples = 2 * samples - 1;
    y_nodes += 24;
    radial *= 2;
    polar *= 2;
    azimuthal *= 2;
    coarse = fine;
  }
  if (!converged)
    throw QuadratureError("dipole-dipole element did not converge under refinement", fine);

  // Cutoff sensitivity at the resolution that produced the converged value.
  double halved = evaluate(0.5 * r_lo, 2 * samples - 1, y_nodes + 24, 2 * radial, 2 * polar,
                           2 * azimuthal);
  return {fine, std::abs(fine - halved)};
}

}  // namespace pauliblock::me
