#include "beckit/ideal_gas.hpp"

#include <cmath>
#include <limits>

#include "beckit/errors.hpp"

namespace beckit {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate(const ThermoState& state) {
  if (!std::isfinite(state.beta) || state.beta <= 0.0) {
    throw DomainError("ideal gas: beta must be positive");
  }
  if (!std::isfinite(state.mu)) throw DomainError("ideal gas: non-finite mu");
  if (state.dim < 1) throw DomainError("ideal gas: dim must be >= 1");
}

}  // namespace

double thermal_prefactor(double beta, int dim) {
  if (!std::isfinite(beta) || beta <= 0.0) throw DomainError("thermal_prefactor: beta must be positive");
  if (dim < 1) throw DomainError("thermal_prefactor: dim must be >= 1");
  return std::pow(4.0 * kPi * beta, -0.5 * dim);
}

double pbg_density(const ThermoState& state, const Accuracy& acc) {
  validate(state);
  if (state.mu > 0.0) throw DomainError("pbg_density: mu must be <= 0");
  if (state.mu == 0.0 && state.dim <= 2) {
    throw DivergentSeries("pbg_density: diverges at mu = 0 for dim <= 2");
  }
  return thermal_prefactor(state.beta, state.dim) *
         bose_polylog(0.5 * state.dim, std::exp(state.beta * state.mu), acc);
}

double pbg_critical_density(double beta, int dim, const Accuracy& acc) {
  if (!std::isfinite(beta) || beta <= 0.0) throw DomainError("pbg_critical_density: beta must be positive");
  if (dim < 1) throw DomainError("pbg_critical_density: dim must be >= 1");
  if (dim <= 2) return std::numeric_limits<double>::infinity();
  return pbg_density({beta, 0.0, dim}, acc);
}

double pbg_pressure(const ThermoState& state, const Accuracy& acc) {
  validate(state);
  if (state.mu > 0.0) throw DomainError("pbg_pressure: mu must be <= 0");
  if (state.mu == 0.0 && state.dim <= 2) {
    throw DomainError("pbg_pressure: mu must be strictly negative for dim <= 2");
  }
  return thermal_prefactor(state.beta, state.dim) / state.beta *
         bose_polylog(0.5 * state.dim + 1.0, std::exp(state.beta * state.mu), acc);
}

}  // namespace beckit
