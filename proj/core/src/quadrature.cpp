#include "pauliblock/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace pauliblock {

std::vector<GaussLegendreNode> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  std::vector<GaussLegendreNode> out(n);
  const double pi = std::numbers::pi;
  // Newton iteration on P_n, one root per node, symmetric pairs share work.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      if (n == 1) {
        p1 = x;
      }
      for (int k = 1; k < n; ++k) {
        double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    out[i] = {-x, w};
    out[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) out[n / 2].x = 0.0;
  return out;
}

SphericalGrid SphericalGrid::product_rule(int polar_order, int azimuthal_points) {
  if (polar_order < 1 || azimuthal_points < 1)
    throw std::invalid_argument("product_rule: orders must be >= 1");
  const double pi = std::numbers::pi;
  auto gl = gauss_legendre(polar_order);
  SphericalGrid g;
  g.nodes.reserve(static_cast<size_t>(polar_order) * azimuthal_points);
  g.weights.reserve(g.nodes.capacity());
  double wphi = 2.0 * pi / azimuthal_points;
  for (const auto& node : gl) {
    double c = node.x;
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < azimuthal_points; ++j) {
      double phi = wphi * j;
      g.nodes.push_back({s * std::cos(phi), s * std::sin(phi), c});
      g.weights.push_back(node.w * wphi);
    }
  }
  return g;
}

namespace detail {

namespace {

template <class T>
T integrate_on(const SphericalGrid& g, const std::function<T(const Vec3&)>& f) {
  T acc{};
  for (size_t i = 0; i < g.nodes.size(); ++i) acc += f(g.nodes[i]) * g.weights[i];
  return acc;
}

template <class T>
T sphere_adaptive(const std::function<T(const Vec3&)>& f, const QuadratureOptions& opts) {
  int np = opts.polar_order;
  int na = opts.azimuthal_points;
  T prev = integrate_on(SphericalGrid::product_rule(np, na), f);
  for (int r = 0; r < opts.max_refinements; ++r) {
    np *= 2;
    na *= 2;
    T cur = integrate_on(SphericalGrid::product_rule(np, na), f);
    double scale = std::max(std::abs(cur), std::abs(prev));
    double diff = std::abs(cur - prev);
    if (diff <= opts.rel_tol * std::max(scale, 1.0)) return cur;
    prev = cur;
  }
  throw QuadratureError("sphere integral did not converge under order doubling",
                        std::abs(prev));
}

}  // namespace

double integrate_sphere_impl(const std::function<double(const Vec3&)>& f,
                             const QuadratureOptions& opts) {
  return sphere_adaptive<double>(f, opts);
}

Complex integrate_sphere_impl(const std::function<Complex(const Vec3&)>& f,
                              const QuadratureOptions& opts) {
  return sphere_adaptive<Complex>(f, opts);
}

double integrate_interval_impl(const std::function<double(double)>& f, double a, double b,
                               const QuadratureOptions& opts) {
  if (!(b > a)) throw std::invalid_argument("integrate_interval: need b > a");
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  auto eval = [&](int n) {
    double acc = 0.0;
    for (const auto& node : gauss_legendre(n)) acc += f(mid + half * node.x) * node.w;
    return acc * half;
  };
  int n = opts.polar_order;
  double prev = eval(n);
  for (int r = 0; r < opts.max_refinements; ++r) {
    n *= 2;
    double cur = eval(n);
    if (std::abs(cur - prev) <= opts.rel_tol * std::max({std::abs(cur), std::abs(prev), 1.0}))
      return cur;
    prev = cur;
  }
  throw QuadratureError("interval integral did not converge under order doubling", prev);
}

}  // namespace detail
}  // namespace pauliblock
