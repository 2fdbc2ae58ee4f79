// Gapped mean-field Bose gas in the thermodynamic limit.
//
// The grand-canonical pressure of the mean-field gas with coupling g*lambda
// and a spectral gap Delta on the zero mode splits into two phases at
// mu_c = g*lambda*rho^P(beta,-Delta) - Delta:
//
//   condensed (mu > mu_c):  rho   = (mu + Delta)/(g lambda)
//                           rho_0 = rho - rho^P(beta, -Delta)
//                           p     = p^P(beta, -Delta) + g lambda rho^2 / 2
//   normal    (mu <= mu_c): rho solves rho = rho^P(beta, mu - g lambda rho)
//                           p     = p^P(beta, mu_eff) + g lambda rho^2 / 2
//
// The pressure obeys dp/dmu = rho and dp/dDelta = rho_0 in both phases,
// which is what the bound engine relies on.

#include "beckit/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beckit/errors.hpp"

namespace beckit {

namespace {

void validate_inputs(double beta, const CouplingParams& coupling,
                     const GapSpec& gap, int dim) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw DomainError("mean-field gas: beta must be positive and finite");
  if (!(coupling.g > 0.0) || !std::isfinite(coupling.g))
    throw DomainError("mean-field gas: coupling g must be positive");
  if (!(coupling.lambda > 0.0) || !std::isfinite(coupling.lambda))
    throw DomainError("mean-field gas: lambda must be positive");
  if (!(gap.delta >= 0.0) || !std::isfinite(gap.delta))
    throw DomainError("mean-field gas: gap must be nonnegative");
  if (dim < 1) throw DomainError("mean-field gas: dimension must be >= 1");
}

// Sign function for the normal-phase self-consistency: increasing in rho.
// Points with nonnegative effective chemical potential sit below the root
// (the ideal-gas density diverges there), so report them as -infinity.
double self_consistency_gap(const ThermoState& state, double gl, double rho) {
  const double mu_eff = state.mu - gl * rho;
  if (mu_eff > 0.0 || (mu_eff == 0.0 && state.dim <= 2))
    return -std::numeric_limits<double>::infinity();
  return rho - pbg_density({state.beta, mu_eff, state.dim});
}

}  // namespace

double mf_condensation_threshold(double beta, const CouplingParams& coupling,
                                 const GapSpec& gap, int dim) {
  validate_inputs(beta, coupling, gap, dim);
  if (gap.delta == 0.0 && dim <= 2)
    throw DivergentSeries(
        "mf_condensation_threshold: gapless gas has no finite threshold in "
        "dimension <= 2");
  const double rho_ref = pbg_density({beta, -gap.delta, dim});
  return coupling.g * coupling.lambda * rho_ref - gap.delta;
}

MeanFieldSolution mf_solve(const ThermoState& state,
                           const CouplingParams& coupling, const GapSpec& gap) {
  validate_inputs(state.beta, coupling, gap, state.dim);
  if (!std::isfinite(state.mu))
    throw DomainError("mf_solve: mu must be finite");

  const double gl = coupling.g * coupling.lambda;
  const double delta = gap.delta;

  // Gapless low-dimensional gas never condenses; everything else compares
  // against the closed-form threshold.
  bool condensed = false;
  if (delta > 0.0 || state.dim >= 3) {
    const double rho_ref = pbg_density({state.beta, -delta, state.dim});
    condensed = state.mu > gl * rho_ref - delta;
  }

  MeanFieldSolution out;
  if (condensed) {
    out.rho_total = (state.mu + delta) / gl;
    out.rho_condensate =
        out.rho_total - pbg_density({state.beta, -delta, state.dim});
    out.mu_eff = -delta;
    out.pressure = pbg_pressure({state.beta, -delta, state.dim}) +
                   0.5 * gl * out.rho_total * out.rho_total;
    out.condensed = true;
    return out;
  }

  // Normal phase.  The map rho -> rho - rho^P(beta, mu - gl*rho) is strictly
  // increasing and negative at rho = 0, so bisection cannot miss the root.
  double hi = std::max((state.mu + delta) / gl,
                       pbg_density({state.beta, std::min(state.mu, -1e-8),
                                    state.dim})) +
              1.0;
  if (!std::isfinite(hi))
    throw ConvergenceFailure("mf_solve: self-consistency bracket overflowed");
  int expansions = 0;
  while (self_consistency_gap(state, gl, hi) <= 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi) || ++expansions > 60)
      throw ConvergenceFailure(
          "mf_solve: self-consistency root not bracketed");
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (self_consistency_gap(state, gl, mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.rho_total = 0.5 * (lo + hi);
  out.rho_condensate = 0.0;
  // Rounding can push mu_eff infinitesimally past the gapless threshold.
  out.mu_eff = std::min(state.mu - gl * out.rho_total, 0.0);
  out.pressure = pbg_pressure({state.beta, out.mu_eff, state.dim}) +
                 0.5 * gl * out.rho_total * out.rho_total;
  out.condensed = false;
  return out;
}

double mf_pressure_delta_derivative_check(const ThermoState& state,
                                          const CouplingParams& coupling,
                                          const GapSpec& gap, double step) {
  validate_inputs(state.beta, coupling, gap, state.dim);
  if (!(step > 0.0) || !std::isfinite(step))
    throw DomainError("derivative check: step must be positive");
  if (gap.delta - step < 0.0)
    throw DomainError("derivative check: stencil leaves the gap range");

  const auto below =
      mf_solve(state, coupling, GapSpec{gap.delta - step, gap.delta0});
  const auto above =
      mf_solve(state, coupling, GapSpec{gap.delta + step, gap.delta0});
  if (below.condensed != above.condensed)
    throw DomainError("derivative check: phase changes within the stencil");

  const auto center = mf_solve(state, coupling, gap);
  const double deriv = (above.pressure - below.pressure) / (2.0 * step);
  constexpr double kFloor = 1e-8;
  return std::fabs(deriv - center.rho_condensate) /
         std::max(center.rho_condensate, kFloor);
}

}  // namespace beckit
