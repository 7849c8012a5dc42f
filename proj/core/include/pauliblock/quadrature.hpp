#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pauliblock/types.hpp"

namespace pauliblock {

struct QuadratureOptions {
  int polar_order = 32;       // Gauss-Legendre nodes in cos(theta)
  int azimuthal_points = 64;  // uniform trapezoid points in phi
  double rel_tol = 1e-10;     // order-doubling convergence target
  int max_refinements = 3;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

struct GaussLegendreNode {
  double x;
  double w;
};

// Nodes and weights for n-point Gauss-Legendre quadrature on [-1, 1].
std::vector<GaussLegendreNode> gauss_legendre(int n);

// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
// uniform (trapezoid, i.e. exact-for-trig) rule in phi. Weights sum to 4*pi.
struct SphericalGrid {
  std::vector<Vec3> nodes;
  std::vector<double> weights;

  static SphericalGrid product_rule(int polar_order, int azimuthal_points);
};

namespace detail {
double integrate_sphere_impl(const std::function<double(const Vec3&)>& f,
                             const QuadratureOptions& opts);
Complex integrate_sphere_impl(const std::function<Complex(const Vec3&)>& f,
                              const QuadratureOptions& opts);
double integrate_interval_impl(const std::function<double(double)>& f, double a,
                               double b, const QuadratureOptions& opts);
}  // namespace detail

// Adaptive-by-order-doubling integrals. The grid starts at the order given in
// opts and doubles until successive estimates agree to rel_tol; failure to
// converge raises QuadratureError carrying the best estimate.
template <class F>
double integrate_sphere(F&& f, const QuadratureOptions& opts = {}) {
  return detail::integrate_sphere_impl(std::function<double(const Vec3&)>(std::forward<F>(f)),
                                       opts);
}

template <class F>
Complex integrate_sphere_complex(F&& f, const QuadratureOptions& opts = {}) {
  return detail::integrate_sphere_impl(std::function<Complex(const Vec3&)>(std::forward<F>(f)),
                                       opts);
}

template <class F>
double integrate_interval(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  return detail::integrate_interval_impl(std::function<double(double)>(std::forward<F>(f)), a, b,
                                         opts);
}

}  // namespace pauliblock
