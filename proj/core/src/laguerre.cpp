#include "pauliblock/laguerre.hpp"

#include <stdexcept>

namespace pauliblock {

double laguerre(int degree, int order, double x) {
  if (degree < 0) throw std::invalid_argument("laguerre: degree must be >= 0");
  if (order < 0) throw std::invalid_argument("laguerre: order must be >= 0");
  if (degree > 60) throw std::invalid_argument("laguerre: degree above supported bound 60");

  double c = static_cast<double>(order);
  if (degree == 0) return 1.0;
  double lkm1 = 1.0;
  double lk = 1.0 + c - x;
  for (int k = 1; k < degree; ++k) {
    double lkp1 = ((2.0 * k + c + 1.0 - x) * lk - (k + c) * lkm1) / (k + 1.0);
    lkm1 = lk;
    lk = lkp1;
  }
  return lk;
}

}  // namespace pauliblock
