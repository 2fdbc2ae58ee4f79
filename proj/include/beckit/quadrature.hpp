#ifndef BECKIT_QUADRATURE_HPP
#define BECKIT_QUADRATURE_HPP

#include <cmath>

#include "beckit/errors.hpp"

namespace beckit {

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::fabs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  // Roundoff floor: once the Richardson difference sits at the rounding noise
  // of the panel sums, further splitting cannot help.
  if (std::fabs(diff) <= 4e-16 * (std::fabs(left) + std::fabs(right) + std::fabs(whole))) {
    return left + right + diff / 15.0;
  }
  if (b - a <= 1e-14 * (std::fabs(a) + std::fabs(b))) return left + right;
  if (depth <= 0) throw QuadratureFailure("adaptive_simpson: refinement depth exhausted");
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with Richardson acceptance; abs_tol is an absolute target.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol, int max_depth = 48) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw DomainError("adaptive_simpson: inverted interval");
  }
  if (!(abs_tol > 0.0)) throw DomainError("adaptive_simpson: tolerance must be positive");
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
    throw QuadratureFailure("adaptive_simpson: non-finite integrand sample");
  }
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

}  // namespace beckit

#endif
