#ifndef BECKIT_MEANFIELD_HPP
#define BECKIT_MEANFIELD_HPP

#include "beckit/ideal_gas.hpp"

namespace beckit {

struct CouplingParams {
  double g = 1.0;       // overall coupling, > 0
  double lambda = 1.0;  // mean-field constant, > 0 (energy x volume)
};

struct MeanFieldSolution {
  double rho_total = 0.0;
  double rho_condensate = 0.0;
  double mu_eff = 0.0;
  double pressure = 0.0;
  bool condensed = false;
};

// Chemical potential above which the gapped mean-field gas condenses:
// mu_c = g*lambda * rho^P(beta, -Delta) - Delta.
// Throws DivergentSeries when Delta = 0 and dim <= 2 (no finite threshold).
double mf_condensation_threshold(double beta, const CouplingParams& coupling,
                                 const GapSpec& gap, int dim);

// Thermodynamic-limit solution of the mean-field gas.  Condensed phase is
// closed-form; the normal phase solves rho = rho^P(beta, mu - g*lambda*rho)
// by bisection.  Exactly at threshold the normal branch is returned.
MeanFieldSolution mf_solve(const ThermoState& state,
                           const CouplingParams& coupling, const GapSpec& gap);

// Central-difference probe of d(pressure)/d(Delta) against the condensate
// density, returned as a relative error.  Throws DomainError if the two
// stencil points straddle the phase boundary.
double mf_pressure_delta_derivative_check(const ThermoState& state,
                                          const CouplingParams& coupling,
                                          const GapSpec& gap, double step);

}  // namespace beckit

#endif
