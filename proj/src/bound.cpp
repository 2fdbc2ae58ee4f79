// Condensate lower bounds for the superstable gapped Bose gas.
//
// Everything here is inequality plumbing around the mean-field reference
// system with lambda = vhat(0).  Two reservations keep the emitted numbers
// honest: the interacting reference density is never "solved", only bounded
// from above (the term it feeds carries a negative sign), and the minimal-gap
// search reports a value certified on its sample grid, not a proof for every
// larger gap.
//
// Expanded bound, reference gap delta0 (delta0 = 0 gives the dim >= 3 form):
//   b = (mu + delta0)/(g vhat0)                          [mu_term]
//     + g vhat0 / (2 (delta - delta0)) * R^2             [quadratic_pbg_term]
//     - (mu + delta)/(delta - delta0) * R                [linear_pbg_term]
//     - g v(0) / (2 (delta - delta0)) * rho_gapless      [v0_term]
//     - rho^P(beta, -delta0)                             [critical_term]
// with R = rho^P(beta, -delta).

#include "beckit/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "beckit/errors.hpp"
#include "beckit/meanfield.hpp"

namespace beckit {

namespace {

void validate_common(const ThermoState& state, double g) {
  if (!(state.beta > 0.0) || !std::isfinite(state.beta))
    throw DomainError("bound: beta must be positive and finite");
  if (!std::isfinite(state.mu)) throw DomainError("bound: mu must be finite");
  if (!(g > 0.0) || !std::isfinite(g))
    throw DomainError("bound: coupling g must be positive");
  if (state.dim < 1) throw DomainError("bound: dimension must be >= 1");
}

void validate_search(const SearchRange& search) {
  if (!(search.lo > 0.0) || !(search.hi >= search.lo) ||
      !std::isfinite(search.hi))
    throw DomainError("bound: search range must satisfy 0 < lo <= hi");
  if (search.points < 2)
    throw DomainError("bound: search needs at least two points");
  if (!(search.rel_tol > 0.0))
    throw DomainError("bound: search rel_tol must be positive");
}

// Tabulated potentials carry no closed-form certificate, so run the sampling
// scan before trusting vhat(0) > 0.  Analytic kinds certify by sign alone.
double certified_vhat0(const PotentialModel& pot, int dim) {
  if (std::holds_alternative<TabulatedPotential>(pot)) {
    const auto report = positivity_check(pot, 30.0, 512);
    if (!report.pass)
      throw NotPositiveType(
          "bound: tabulated potential failed the positivity scan");
  }
  const double vhat0 = vhat(pot, 0.0, dim);
  if (!(vhat0 > 0.0))
    throw NotPositiveType("bound: vhat(0) must be positive");
  return vhat0;
}

struct QuotientContext {
  ThermoState state;
  CouplingParams coupling;  // g and lambda = vhat0
  GapSpec gap;
  double v0;
  double p_lb;
};

// [p_ub(mu + d) - p_lb(mu)] / d, the convexity difference quotient.
double density_quotient(const QuotientContext& ctx, double d) {
  const ThermoState shifted{ctx.state.beta,
                            ctx.state.mu + d + ctx.coupling.g * ctx.v0 / 2.0,
                            ctx.state.dim};
  const double p_ub = mf_solve(shifted, ctx.coupling, ctx.gap).pressure;
  return (p_ub - ctx.p_lb) / d;
}

double resolve_rho_gapless(const ThermoState& state, double g,
                           const PotentialModel& pot, double delta_ref,
                           const RhoGaplessMode& rg) {
  if (rg.kind == RhoGaplessMode::Kind::user_supplied) {
    if (!(rg.value >= 0.0) || !std::isfinite(rg.value))
      throw DomainError("bound: user density must be nonnegative and finite");
    return rg.value;
  }
  return interacting_density_upper_bound(state, g, pot, delta_ref, rg.search);
}

BoundTerms expanded_terms(const ThermoState& state, double g, double delta,
                          double delta0, double vhat0, double v0,
                          double rho_gapless) {
  const double gv = g * vhat0;
  const double denom = delta - delta0;
  const double rho_gap = pbg_density({state.beta, -delta, state.dim});
  const double rho_ref = pbg_density({state.beta, -delta0, state.dim});
  BoundTerms t;
  t.mu_term = (state.mu + delta0) / gv;
  t.quadratic_pbg_term = gv / (2.0 * denom) * rho_gap * rho_gap;
  t.linear_pbg_term = -((state.mu + delta) / denom) * rho_gap;
  t.v0_term = -(g * v0 / (2.0 * denom)) * rho_gapless;
  t.critical_term = -rho_ref;
  return t;
}

double terms_sum(const BoundTerms& t) {
  return t.mu_term + t.quadratic_pbg_term + t.linear_pbg_term + t.v0_term +
         t.critical_term;
}

}  // namespace

double interacting_density_upper_bound(const ThermoState& state, double g,
                                       const PotentialModel& pot,
                                       double delta_ref,
                                       const SearchRange& search) {
  validate_common(state, g);
  validate_search(search);
  if (!(delta_ref >= 0.0) || !std::isfinite(delta_ref))
    throw DomainError("bound: reference gap must be nonnegative");
  if (delta_ref == 0.0 && state.dim < 3)
    throw DomainError(
        "bound: gapless reference density needs dimension >= 3");

  QuotientContext ctx;
  ctx.state = state;
  ctx.coupling = {g, certified_vhat0(pot, state.dim)};
  ctx.gap = {delta_ref, 0.0};
  ctx.v0 = v_at_origin(pot);

  // Gibbs-Bogoliubov floor for the interacting pressure at mu itself.
  const auto base = mf_solve(state, ctx.coupling, ctx.gap);
  const double rho2 = base.rho_total * base.rho_total -
                      base.rho_condensate * base.rho_condensate;
  ctx.p_lb = base.pressure - 0.5 * g * ctx.coupling.lambda * rho2;

  // Log grid, then golden-section polish around the grid minimum.
  const int n = search.points;
  const double log_lo = std::log(search.lo);
  const double log_hi = std::log(search.hi);
  double best = std::numeric_limits<double>::infinity();
  int best_idx = -1;
  for (int i = 0; i < n; ++i) {
    const double d =
        std::exp(log_lo + (log_hi - log_lo) * i / static_cast<double>(n - 1));
    const double q = density_quotient(ctx, d);
    if (std::isfinite(q) && q < best) {
      best = q;
      best_idx = i;
    }
  }
  if (best_idx < 0)
    throw EmptySearch("bound: no increment gave a finite density quotient");

  const auto grid_point = [&](int i) {
    return std::exp(log_lo + (log_hi - log_lo) *
                                 std::clamp(i, 0, n - 1) /
                                 static_cast<double>(n - 1));
  };
  double a = grid_point(best_idx - 1);
  double b = grid_point(best_idx + 1);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = density_quotient(ctx, x1);
  double f2 = density_quotient(ctx, x2);
  for (int it = 0; it < 200 && (b - a) > search.rel_tol * b; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = density_quotient(ctx, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = density_quotient(ctx, x2);
    }
    if (std::isfinite(f1)) best = std::min(best, f1);
    if (std::isfinite(f2)) best = std::min(best, f2);
  }
  return best;
}

BoundReport condensate_lower_bound(const ThermoState& state, double g,
                                   const GapSpec& gap,
                                   const PotentialModel& pot,
                                   const RhoGaplessMode& rg) {
  validate_common(state, g);
  if (state.dim < 3)
    throw DomainError(
        "condensate_lower_bound: needs dimension >= 3 (use the gapped-"
        "reference variant below three dimensions)");
  if (!(gap.delta > 0.0) || !std::isfinite(gap.delta))
    throw DomainError("condensate_lower_bound: gap must be positive");

  const double vhat0 = certified_vhat0(pot, state.dim);
  const double v0 = v_at_origin(pot);
  const double rho_gapless = resolve_rho_gapless(state, g, pot, 0.0, rg);

  BoundReport report;
  report.terms = expanded_terms(state, g, gap.delta, 0.0, vhat0, v0,
                                rho_gapless);
  report.lower_bound = terms_sum(report.terms);
  report.rho_gapless_used = rho_gapless;
  const double rho_c = pbg_critical_density(state.beta, state.dim);
  if (!(state.mu > g * vhat0 * rho_c)) {
    report.validity_reasons.push_back(
        "requires mu > g * vhat(0) * rho_c^P(beta)");
  }
  report.valid = report.validity_reasons.empty();
  return report;
}

BoundReport condensate_lower_bound_gapped_reference(
    const ThermoState& state, double g, const GapSpec& gap,
    const PotentialModel& pot, const RhoGaplessMode& rg_at_delta0) {
  validate_common(state, g);
  if (!(gap.delta0 > 0.0) || !std::isfinite(gap.delta0))
    throw DomainError("gapped-reference bound: delta0 must be positive");
  if (!(gap.delta > gap.delta0) || !std::isfinite(gap.delta))
    throw DomainError("gapped-reference bound: requires delta > delta0");

  const double vhat0 = certified_vhat0(pot, state.dim);
  const double v0 = v_at_origin(pot);
  const double rho_gapless =
      resolve_rho_gapless(state, g, pot, gap.delta0, rg_at_delta0);

  BoundReport report;
  report.terms = expanded_terms(state, g, gap.delta, gap.delta0, vhat0, v0,
                                rho_gapless);
  report.lower_bound = terms_sum(report.terms);
  report.rho_gapless_used = rho_gapless;
  // The reference closed forms hold only when the delta0 system condenses.
  const double rho_ref = pbg_density({state.beta, -gap.delta0, state.dim});
  if (!(state.mu > g * vhat0 * rho_ref - gap.delta0)) {
    report.validity_reasons.push_back(
        "requires condensation of the reference system: mu > g * vhat(0) * "
        "rho^P(beta, -delta0) - delta0");
  }
  report.valid = report.validity_reasons.empty();
  return report;
}

double find_minimal_gap(const ThermoState& state, double g,
                        const PotentialModel& pot, double eta,
                        const RhoGaplessMode& rg, double delta_cap) {
  validate_common(state, g);
  if (state.dim < 3)
    throw DomainError("find_minimal_gap: needs dimension >= 3");
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw DomainError("find_minimal_gap: eta must be positive");
  if (!(delta_cap > 0.0) || !std::isfinite(delta_cap))
    throw DomainError("find_minimal_gap: delta_cap must be positive");

  const double vhat0 = certified_vhat0(pot, state.dim);
  const double rho_c = pbg_critical_density(state.beta, state.dim);
  if (!(state.mu > g * vhat0 * (rho_c + 3.0 * eta)))
    throw PreconditionFailed(
        "find_minimal_gap: requires mu > g * vhat(0) * (rho_c^P + 3 eta)");

  // The reference density is gap-independent here; resolve it once.
  const double rho_gapless = resolve_rho_gapless(state, g, pot, 0.0, rg);
  const auto rg_fixed = RhoGaplessMode::user(rho_gapless);
  const auto bound_at = [&](double delta) {
    return condensate_lower_bound(state, g, GapSpec{delta, 0.0}, pot, rg_fixed)
        .lower_bound;
  };

  const int n = 200;
  const double lo_grid = std::min(1e-3, delta_cap / 100.0);
  const double log_lo = std::log(lo_grid);
  const double log_hi = std::log(delta_cap);
  std::vector<double> grid(n), value(n);
  for (int i = 0; i < n; ++i) {
    grid[i] =
        std::exp(log_lo + (log_hi - log_lo) * i / static_cast<double>(n - 1));
    value[i] = bound_at(grid[i]);
  }

  // First index whose entire sampled tail clears eta.
  int first = -1;
  for (int i = n - 1; i >= 0; --i) {
    if (value[i] >= eta)
      first = i;
    else
      break;
  }
  if (first < 0) throw NotFound("find_minimal_gap: no gap up to delta_cap qualifies");

  double hi = grid[first];
  double lo;
  if (first > 0) {
    lo = grid[first - 1];
  } else {
    // Qualifies at the bottom of the grid; walk down until the bound drops.
    lo = hi / 2.0;
    int steps = 0;
    while (bound_at(lo) >= eta && ++steps < 60) {
      hi = lo;
      lo /= 2.0;
    }
    if (steps >= 60) return hi;
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    if (bound_at(mid) >= eta)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace beckit
