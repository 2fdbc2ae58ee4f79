#ifndef BECKIT_IDEAL_GAS_HPP
#define BECKIT_IDEAL_GAS_HPP

#include "beckit/special_functions.hpp"

namespace beckit {

// Reduced units throughout: hbar^2/2m = 1 and k_B = 1, so the one-particle
// energy is eps(k) = |k|^2 and beta, mu carry inverse-energy / energy units.

struct ThermoState {
  double beta;
  double mu;
  int dim = 3;
};

struct GapSpec {
  double delta = 0.0;   // zero-mode shift, >= 0
  double delta0 = 0.0;  // reference gap for the low-dimension variant
};

// (4 pi beta)^{-D/2}, the density scale set by the thermal wavelength.
double thermal_prefactor(double beta, int dim);

// Ideal-gas density (4 pi beta)^{-D/2} g_{D/2}(e^{beta mu}), mu <= 0.
double pbg_density(const ThermoState& state, const Accuracy& acc = {});

// Density at mu = 0 for dim >= 3; +infinity for dim <= 2 where the ideal gas
// has no condensation threshold. The infinity is a value, not an error, so
// threshold comparisons stay writable in every dimension.
double pbg_critical_density(double beta, int dim, const Accuracy& acc = {});

// Ideal-gas pressure beta^{-1} (4 pi beta)^{-D/2} g_{D/2+1}(e^{beta mu}).
double pbg_pressure(const ThermoState& state, const Accuracy& acc = {});

}  // namespace beckit

#endif
