#pragma once

namespace pauliblock {

// Generalized Laguerre polynomial L_degree^order(x), evaluated by the
// three-term recurrence in the degree. The recurrence is forward-stable for
// the argument range arising from recoil matrix elements (x = kappa^2 <= 4).
// Degrees above 60 are rejected: they never occur for the supported basis
// sizes and keep the accuracy guarantee simple.
double laguerre(int degree, int order, double x);

}  // namespace pauliblock
