#ifndef BECKIT_SPECIAL_FUNCTIONS_HPP
#define BECKIT_SPECIAL_FUNCTIONS_HPP

#include <cstdint>

namespace beckit {

struct Accuracy {
  double abs_tol = 1e-10;
  std::int64_t max_terms = 1000000;
};

// Bose function g_s(z) = Sum_{n>=1} z^n / n^s for 0 <= z <= 1, s > 0.
// Direct compensated series away from z = 1, expansion about z = 1 beyond
// z = 0.99. Deterministic for fixed inputs.
double bose_polylog(double s, double z, const Accuracy& acc = {});

// Riemann zeta for s > 1; equals bose_polylog(s, 1).
double zeta(double s, const Accuracy& acc = {});

namespace detail {

// Analytic continuation of zeta to all real s != 1 (Euler-Maclaurin, with
// the reflection formula for s < 1/2). Internal: feeds the z -> 1 expansion,
// which needs zeta at arguments s - n.
double zeta_continued(double s);

}  // namespace detail

}  // namespace beckit

#endif
