#ifndef BECKIT_BOUND_HPP
#define BECKIT_BOUND_HPP

#include <string>
#include <vector>

#include "beckit/ideal_gas.hpp"
#include "beckit/potential.hpp"

namespace beckit {

// Search window for the difference-quotient density bound: chemical-potential
// increments are scanned on a log grid, then the minimum is polished by
// golden-section to rel_tol.
struct SearchRange {
  double lo = 1e-3;
  double hi = 10.0;
  int points = 200;
  double rel_tol = 1e-8;
};

// How the unknown interacting reference density enters the bound.  Either the
// caller supplies a number they can defend, or we substitute the rigorous
// difference-quotient upper bound (safe: the term carries a negative sign).
struct RhoGaplessMode {
  enum class Kind { user_supplied, rigorous_upper_bound };
  Kind kind = Kind::rigorous_upper_bound;
  double value = 0.0;
  SearchRange search{};

  static RhoGaplessMode user(double rho) {
    RhoGaplessMode m;
    m.kind = Kind::user_supplied;
    m.value = rho;
    return m;
  }
  static RhoGaplessMode rigorous(const SearchRange& sr = {}) {
    RhoGaplessMode m;
    m.kind = Kind::rigorous_upper_bound;
    m.search = sr;
    return m;
  }
};

struct BoundTerms {
  double mu_term = 0.0;
  double quadratic_pbg_term = 0.0;
  double linear_pbg_term = 0.0;
  double v0_term = 0.0;
  double critical_term = 0.0;
};

struct BoundReport {
  double lower_bound = 0.0;
  BoundTerms terms;
  double rho_gapless_used = 0.0;
  bool valid = false;
  std::vector<std::string> validity_reasons;
};

// Rigorous upper bound on the total density of the interacting gas with gap
// delta_ref, via pressure sandwich plus convexity in mu:
//   rho <= min_{d in search} [p_ub(mu + d) - p_lb(mu)] / d.
// Needs dim >= 3 when delta_ref = 0.
double interacting_density_upper_bound(const ThermoState& state, double g,
                                       const PotentialModel& pot,
                                       double delta_ref,
                                       const SearchRange& search = {});

// Condensate-density lower bound for the gapped interacting gas, dim >= 3.
// The report carries the term breakdown; `valid` records whether the
// proof-side precondition mu > g*vhat(0)*rho_c^P(beta) held.
BoundReport condensate_lower_bound(const ThermoState& state, double g,
                                   const GapSpec& gap,
                                   const PotentialModel& pot,
                                   const RhoGaplessMode& rg);

// Variant with a gapped reference system 0 < delta0 < delta; works in any
// dimension >= 1.  Correction terms carry the denominator delta - delta0 and
// the interacting reference density is taken at gap delta0.
BoundReport condensate_lower_bound_gapped_reference(const ThermoState& state,
                                                    double g,
                                                    const GapSpec& gap,
                                                    const PotentialModel& pot,
                                                    const RhoGaplessMode& rg_at_delta0);

// Smallest gap in (0, delta_cap] whose condensate bound stays >= eta on the
// sampled tail up to delta_cap, resolved by bisection to 1e-6.  Throws
// PreconditionFailed unless mu > g*vhat(0)*(rho_c^P + 3*eta), NotFound when
// no sampled gap qualifies.
double find_minimal_gap(const ThermoState& state, double g,
                        const PotentialModel& pot, double eta,
                        const RhoGaplessMode& rg, double delta_cap);

}  // namespace beckit

#endif
