#include "beckit/special_functions.hpp"

#include <cmath>
#include <cstdlib>

#include "beckit/errors.hpp"

/*
 * Bose functions g_s(z) = Li_s(z) on the physical strip 0 <= z <= 1.
 *
 * Three regimes:
 *   z <= 0.99      direct series with compensated summation; the tail after
 *                  N terms is bounded by z^{N+1} / ((N+1)^s (1-z)).
 *   z  > 0.99      expansion about z = 1 (Robinson 1951).  With z = e^{-a}:
 *                    g_s(e^-a) = Gamma(1-s) a^{s-1}
 *                              + Sum_{n>=0} zeta(s-n) (-a)^n / n!
 *                  valid for non-integer s, |a| < 2pi.  For integer s = m >= 2
 *                  the n = m-1 term is replaced by its finite limit:
 *                    (-a)^{m-1}/(m-1)! * (H_{m-1} - ln a),
 *                  H_k the harmonic numbers.
 *   z == 1         zeta(s) for s > 1, divergent otherwise.
 *
 * zeta at the shifted arguments s - n (which go far negative) comes from an
 * Euler-Maclaurin tail for s >= 1/2 and the reflection formula below that.
 */

namespace beckit {

namespace {

// B_{2k} for 2k = 2..32, exact rationals; numerators all below 2^53.
constexpr double kBernoulli[] = {
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
    -7709321041217.0 / 510.0,
};
constexpr int kBernoulliCount = 16;

double zeta_euler_maclaurin(double s) {
  // Pivot 24: remainder far below 1e-16 for s >= 1/2.
  constexpr int a = 24;
  double sum = 0.0;
  double comp = 0.0;
  for (int n = 1; n < a; ++n) {
    double term = std::pow(static_cast<double>(n), -s);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  sum += std::pow(static_cast<double>(a), 1.0 - s) / (s - 1.0);
  sum += 0.5 * std::pow(static_cast<double>(a), -s);
  double apow = std::pow(static_cast<double>(a), -s - 1.0);
  double poch = s;  // (s)(s+1)...(s+2k-2), k = 1 term: just s
  for (int k = 1; k <= kBernoulliCount; ++k) {
    double fact = 1.0;
    for (int j = 2; j <= 2 * k; ++j) fact *= j;
    double term = kBernoulli[k - 1] / fact * poch * apow;
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
    poch *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    apow /= static_cast<double>(a) * a;
  }
  return sum;
}

constexpr double kPi = 3.14159265358979323846;

}  // namespace

namespace detail {

double zeta_continued(double s) {
  // Euler-Maclaurin handles s >= -1/2 directly (and must: the reflection
  // factor zeta(1-s) would sit on the pole near s = 0). Below -1/2 reflect,
  // which keeps the Euler-Maclaurin argument 1-s > 3/2.
  if (s >= -0.5) return zeta_euler_maclaurin(s);
  // zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s)
  return std::pow(2.0, s) * std::pow(kPi, s - 1.0) * std::sin(0.5 * kPi * s) *
         std::tgamma(1.0 - s) * zeta_euler_maclaurin(1.0 - s);
}

}  // namespace detail

namespace {

// Expansion about z = 1, z = e^{-alpha}, alpha in (0, ~0.0101].
double polylog_near_one(double s, double alpha, double abs_tol) {
  const double log_alpha = std::log(alpha);
  const long m = std::lround(s);
  const bool integer_order = std::fabs(s - static_cast<double>(m)) < 1e-9 && m >= 2;

  double sum = 0.0;
  if (!integer_order) {
    sum = std::tgamma(1.0 - s) * std::pow(alpha, s - 1.0);
  }

  const double term_tol = 0.05 * abs_tol;
  double power = 1.0;  // (-alpha)^n / n!
  double harmonic = 0.0;
  int small_streak = 0;
  for (int n = 0; n <= 60; ++n) {
    double term;
    if (integer_order && n == m - 1) {
      term = power * (harmonic - log_alpha);
    } else {
      term = detail::zeta_continued(s - n) * power;
    }
    sum += term;
    if (n >= 3) {
      small_streak = (std::fabs(term) < term_tol) ? small_streak + 1 : 0;
      if (small_streak >= 2) break;
    }
    power *= -alpha / (n + 1);
    harmonic += 1.0 / (n + 1);
  }
  return sum;
}

double polylog_series(double s, double z, const Accuracy& acc) {
  double sum = 0.0;
  double comp = 0.0;
  double zp = 1.0;
  const double one_minus_z = 1.0 - z;
  for (std::int64_t n = 1; n <= acc.max_terms; ++n) {
    zp *= z;
    double term = zp * std::pow(static_cast<double>(n), -s);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    // Tail bound: sum_{k>n} z^k/k^s <= z^{n+1} / ((n+1)^s (1-z)).
    double tail = zp * z / (std::pow(n + 1.0, s) * one_minus_z);
    if (tail <= acc.abs_tol) return sum;
  }
  throw ConvergenceFailure("bose_polylog: series needs more than max_terms terms");
}

}  // namespace

double bose_polylog(double s, double z, const Accuracy& acc) {
  if (!std::isfinite(s) || !std::isfinite(z)) {
    throw DomainError("bose_polylog: non-finite argument");
  }
  if (z < 0.0 || z > 1.0) throw DomainError("bose_polylog: fugacity outside [0, 1]");
  if (s <= 0.0) throw DomainError("bose_polylog: order must be positive");
  if (acc.abs_tol <= 0.0 || acc.max_terms < 1) throw DomainError("bose_polylog: bad Accuracy");
  if (z == 0.0) return 0.0;
  if (z == 1.0) {
    if (s <= 1.0) throw DivergentSeries("bose_polylog: g_s(1) diverges for s <= 1");
    return detail::zeta_continued(s);
  }
  if (std::fabs(s - 1.0) < 1e-9) return -std::log1p(-z);
  if (z > 0.99) return polylog_near_one(s, -std::log(z), acc.abs_tol);
  return polylog_series(s, z, acc);
}

double zeta(double s, const Accuracy& acc) {
  if (!std::isfinite(s)) throw DomainError("zeta: non-finite order");
  if (s == 1.0) throw DivergentSeries("zeta: pole at s = 1");
  if (s < 1.0) throw DomainError("zeta: order must exceed 1");
  (void)acc;  // Euler-Maclaurin tail is far below any admissible abs_tol.
  return detail::zeta_continued(s);
}

}  // namespace beckit
