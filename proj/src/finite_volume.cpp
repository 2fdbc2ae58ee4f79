// Exact finite-volume runs of the mean-field gas.
//
// The interaction g lambda N^2/(2V) is diagonal in total particle number, so
// the grand-canonical trace factorizes exactly into canonical free-gas
// partition functions Z_N combined with N-diagonal weights.  Z_N comes from
// the standard Bose recursion; everything stays in the log domain because
// beta Delta N easily exceeds floating-point range.
//
// Determinism: both execution backends fill indexed slots and reduce with the
// fixed-block summation from parallel.hpp, so serial and parallel runs agree
// bitwise.

#include "beckit/finite_volume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "beckit/errors.hpp"

namespace beckit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void validate_spec(const FiniteVolumeSpec& spec) {
  if (!(spec.box_side > 0.0) || !std::isfinite(spec.box_side))
    throw DomainError("finite volume: box side must be positive");
  if (!(spec.energy_cutoff > 0.0) || !std::isfinite(spec.energy_cutoff))
    throw DomainError("finite volume: energy cutoff must be positive");
  if (spec.n_max < 1)
    throw DomainError("finite volume: n_max must be at least 1");
  if (spec.dim < 1) throw DomainError("finite volume: dimension must be >= 1");
  if (!(spec.gap.delta >= 0.0) || !std::isfinite(spec.gap.delta))
    throw DomainError("finite volume: gap must be nonnegative");
  if (spec.mode_capacity < 1)
    throw DomainError("finite volume: mode capacity must be positive");
  if (!(spec.tail_bound > 0.0))
    throw DomainError("finite volume: tail bound must be positive");
}

void validate_spectrum(const OccupationSpectrum& sp) {
  if (sp.energies.empty() || sp.energies.size() != sp.multiplicities.size())
    throw DomainError("finite volume: malformed spectrum");
  if (sp.multiplicities[0] != 1)
    throw DomainError("finite volume: zero mode must have multiplicity 1");
  for (std::size_t i = 0; i < sp.energies.size(); ++i) {
    if (!std::isfinite(sp.energies[i]) || sp.multiplicities[i] < 1)
      throw DomainError("finite volume: malformed spectrum");
    if (i > 0 && sp.energies[i] < sp.energies[i - 1])
      throw DomainError("finite volume: spectrum must be sorted");
  }
}

// log(sum_j exp(values[j])) with deterministic fixed-block reduction.
// scratch must have room for n entries.
double log_sum_exp(const double* values, std::int64_t n, double* scratch,
                   Execution exec) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n; ++i) mx = std::max(mx, values[i]);
  for_index(n, exec, [&](std::int64_t i) { scratch[i] = std::exp(values[i] - mx); });
  return mx + std::log(block_sum(scratch, n, exec));
}

// <n_0>_N for every N at once via the exact resummation
//   <n_0>_N = e^{beta Delta} (Z_{N-1}/Z_N) (1 + <n_0>_{N-1}),
// which is the j-shifted form of the defining sum over e^{j beta Delta}
// Z_{N-j}/Z_N.  O(n_max) and purely sequential.
std::vector<double> occupation_table(const std::vector<double>& log_z,
                                     double beta, double delta) {
  std::vector<double> occ(log_z.size(), 0.0);
  for (std::size_t n = 1; n < log_z.size(); ++n) {
    const double ratio = std::exp(beta * delta + log_z[n - 1] - log_z[n]);
    occ[n] = ratio * (1.0 + occ[n - 1]);
  }
  return occ;
}

struct GrandSums {
  double pressure = 0.0;
  double density = 0.0;
  double condensate = 0.0;
  double tail_weight = 0.0;
  double second_moment = 0.0;  // <N^2>
};

GrandSums grand_sums(double beta, double mu, double g_lambda, double volume,
                     const std::vector<double>& log_z,
                     const std::vector<double>& occ, Execution exec) {
  const std::int64_t count = static_cast<std::int64_t>(log_z.size());
  std::vector<double> log_w(count), slot(count);
  for_index(count, exec, [&](std::int64_t n) {
    const double dn = static_cast<double>(n);
    log_w[n] = beta * mu * dn - beta * g_lambda * dn * dn / (2.0 * volume) +
               log_z[n];
  });
  double mx = -std::numeric_limits<double>::infinity();
  for (std::int64_t n = 0; n < count; ++n) mx = std::max(mx, log_w[n]);

  for_index(count, exec, [&](std::int64_t n) { slot[n] = std::exp(log_w[n] - mx); });
  std::vector<double> weight = slot;
  const double norm = block_sum(weight.data(), count, exec);

  for_index(count, exec,
            [&](std::int64_t n) { slot[n] = weight[n] * static_cast<double>(n); });
  const double first = block_sum(slot.data(), count, exec);
  for_index(count, exec, [&](std::int64_t n) {
    slot[n] = weight[n] * static_cast<double>(n) * static_cast<double>(n);
  });
  const double second = block_sum(slot.data(), count, exec);
  for_index(count, exec, [&](std::int64_t n) { slot[n] = weight[n] * occ[n]; });
  const double zero = block_sum(slot.data(), count, exec);

  GrandSums out;
  out.pressure = (mx + std::log(norm)) / (beta * volume);
  out.density = first / (norm * volume);
  out.condensate = zero / (norm * volume);
  out.tail_weight = weight[count - 1] / norm;
  out.second_moment = second / norm;
  if (!std::isfinite(out.pressure))
    throw OverflowGuard("finite volume: grand-canonical sum overflowed");
  return out;
}

}  // namespace

OccupationSpectrum enumerate_modes(const FiniteVolumeSpec& spec) {
  validate_spec(spec);
  const double unit = kTwoPi / spec.box_side;  // lattice spacing in k
  const double kfac = unit * unit;
  const long long nsq_max = static_cast<long long>(
      std::floor(spec.energy_cutoff / kfac + 1e-12));

  // Cheap lower bound on the mode count: the cube inscribed in the ball
  // |n|^2 <= nsq_max.  Refuses absurd requests before enumerating.
  if (nsq_max >= 0) {
    const double side =
        2.0 * std::floor(std::sqrt(static_cast<double>(nsq_max) / spec.dim)) + 1.0;
    if (std::pow(side, spec.dim) > static_cast<double>(spec.mode_capacity) + 0.5)
      throw CapacityExceeded("finite volume: mode count exceeds capacity");
  }

  const long long r =
      nsq_max >= 0
          ? static_cast<long long>(std::floor(std::sqrt(static_cast<double>(nsq_max))))
          : -1;
  std::map<long long, std::int64_t> shells;
  std::int64_t count = 0;
  std::vector<long long> idx(spec.dim, -r);
  bool done = (r < 0);
  while (!done) {
    long long nsq = 0;
    for (const long long c : idx) nsq += c * c;
    if (nsq <= nsq_max) {
      if (++count > spec.mode_capacity)
        throw CapacityExceeded("finite volume: mode count exceeds capacity");
      ++shells[nsq];
    }
    int d = 0;
    for (; d < spec.dim; ++d) {
      if (++idx[d] <= r) break;
      idx[d] = -r;
    }
    done = (d == spec.dim);
  }
  if (shells.find(0) == shells.end())
    throw DomainError("finite volume: cutoff excludes even the zero mode");

  OccupationSpectrum sp;
  sp.energies.reserve(shells.size());
  sp.multiplicities.reserve(shells.size());
  sp.energies.push_back(-spec.gap.delta);
  sp.multiplicities.push_back(1);
  for (const auto& [nsq, mult] : shells) {
    if (nsq == 0) continue;
    sp.energies.push_back(kfac * static_cast<double>(nsq));
    sp.multiplicities.push_back(mult);
  }
  return sp;
}

std::vector<double> canonical_log_partition(const OccupationSpectrum& spectrum,
                                            double beta, int n_max,
                                            Execution exec) {
  validate_spectrum(spectrum);
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw DomainError("finite volume: beta must be nonnegative and finite");
  if (n_max < 1) throw DomainError("finite volume: n_max must be at least 1");

  const std::int64_t m = static_cast<std::int64_t>(spectrum.energies.size());
  std::vector<double> term(std::max<std::int64_t>(m, n_max)),
      scratch(std::max<std::int64_t>(m, n_max));

  // Single-particle sums Z_1(j beta) for j = 1..n_max.
  std::vector<double> log_z1(n_max + 1, 0.0);
  for (int j = 1; j <= n_max; ++j) {
    const double tau = static_cast<double>(j) * beta;
    for_index(m, exec, [&](std::int64_t i) {
      term[i] = -tau * spectrum.energies[i] +
                std::log(static_cast<double>(spectrum.multiplicities[i]));
    });
    log_z1[j] = log_sum_exp(term.data(), m, scratch.data(), exec);
    if (!std::isfinite(log_z1[j]))
      throw OverflowGuard("finite volume: single-particle sum overflowed");
  }

  std::vector<double> log_z(n_max + 1);
  log_z[0] = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    for_index(n, exec, [&](std::int64_t i) {
      term[i] = log_z1[i + 1] + log_z[n - 1 - i];
    });
    log_z[n] = log_sum_exp(term.data(), n, scratch.data(), exec) -
               std::log(static_cast<double>(n));
    if (!std::isfinite(log_z[n]))
      throw OverflowGuard("finite volume: canonical recursion overflowed");
  }
  return log_z;
}

std::vector<double> canonical_log_partition(const FiniteVolumeSpec& spec,
                                            double beta, Execution exec) {
  return canonical_log_partition(enumerate_modes(spec), beta, spec.n_max, exec);
}

double zero_mode_occupation(const std::vector<double>& log_z, double beta,
                            double delta, int n, Execution exec) {
  if (log_z.empty() || n < 0 || n >= static_cast<int>(log_z.size()))
    throw DomainError("zero_mode_occupation: n outside the partition table");
  if (!(beta >= 0.0) || !std::isfinite(beta) || !std::isfinite(delta))
    throw DomainError("zero_mode_occupation: bad beta or delta");
  if (n == 0) return 0.0;
  std::vector<double> term(n), scratch(n);
  for_index(n, exec, [&](std::int64_t i) {
    const double j = static_cast<double>(i + 1);
    term[i] = j * beta * delta + log_z[n - 1 - i] - log_z[n];
  });
  return std::exp(log_sum_exp(term.data(), n, scratch.data(), exec));
}

FiniteVolumeResult grand_canonical_solve(const FiniteVolumeSpec& spec,
                                         const ThermoState& state,
                                         const CouplingParams& coupling,
                                         Execution exec) {
  validate_spec(spec);
  if (!(state.beta > 0.0) || !std::isfinite(state.beta))
    throw DomainError("finite volume: beta must be positive");
  if (!std::isfinite(state.mu))
    throw DomainError("finite volume: mu must be finite");
  if (state.dim != spec.dim)
    throw DomainError("finite volume: state and spec dimensions disagree");
  if (!(coupling.g > 0.0) || !(coupling.lambda > 0.0))
    throw DomainError("finite volume: coupling must be positive");

  const auto spectrum = enumerate_modes(spec);
  const auto log_z = canonical_log_partition(spectrum, state.beta, spec.n_max, exec);
  const auto occ = occupation_table(log_z, state.beta, spec.gap.delta);
  const double volume = std::pow(spec.box_side, spec.dim);
  const auto sums = grand_sums(state.beta, state.mu,
                               coupling.g * coupling.lambda, volume, log_z, occ,
                               exec);
  if (sums.tail_weight > spec.tail_bound)
    throw TruncationError(
        "finite volume: weight at n_max above the tail bound; raise n_max");

  FiniteVolumeResult out;
  out.pressure = sums.pressure;
  out.density = sums.density;
  out.condensate = sums.condensate;
  out.tail_weight = sums.tail_weight;
  out.mode_count = spectrum.mode_count();
  return out;
}

FiniteVolumeResult grand_canonical_solve_auto(FiniteVolumeSpec spec,
                                              const ThermoState& state,
                                              const CouplingParams& coupling,
                                              Execution exec) {
  const double volume = std::pow(spec.box_side, spec.dim);
  const auto mf = mf_solve(state, coupling, spec.gap);
  const double target = std::ceil(3.0 * volume * mf.rho_total);
  spec.n_max = static_cast<int>(std::max(8.0, std::min(target, 2e8)));
  for (int attempt = 0;; ++attempt) {
    try {
      return grand_canonical_solve(spec, state, coupling, exec);
    } catch (const TruncationError&) {
      if (attempt >= 2) throw;
      spec.n_max *= 2;
    }
  }
}

BogoliubovMargins verify_bogoliubov_pair(const FiniteVolumeSpec& spec,
                                         const ThermoState& state, double g,
                                         double lambda1, double lambda2,
                                         Execution exec) {
  validate_spec(spec);
  if (!(g > 0.0) || !(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw DomainError("bogoliubov pair: couplings must be positive");
  if (lambda1 > lambda2)
    throw DomainError("bogoliubov pair: needs lambda1 <= lambda2");
  if (state.dim != spec.dim)
    throw DomainError("bogoliubov pair: state and spec dimensions disagree");
  if (!(state.beta > 0.0) || !std::isfinite(state.beta) ||
      !std::isfinite(state.mu))
    throw DomainError("bogoliubov pair: bad thermodynamic state");

  const auto spectrum = enumerate_modes(spec);
  const auto log_z = canonical_log_partition(spectrum, state.beta, spec.n_max, exec);
  const auto occ = occupation_table(log_z, state.beta, spec.gap.delta);
  const double volume = std::pow(spec.box_side, spec.dim);

  const auto one = grand_sums(state.beta, state.mu, g * lambda1, volume, log_z,
                              occ, exec);
  const auto two = grand_sums(state.beta, state.mu, g * lambda2, volume, log_z,
                              occ, exec);
  if (one.tail_weight > spec.tail_bound || two.tail_weight > spec.tail_bound)
    throw TruncationError("bogoliubov pair: tail bound exceeded; raise n_max");

  const double scale = g * (lambda2 - lambda1) / (2.0 * volume * volume);
  BogoliubovMargins out;
  out.pressure_difference = one.pressure - two.pressure;
  out.lower_margin = out.pressure_difference - scale * two.second_moment;
  out.upper_margin = scale * one.second_moment - out.pressure_difference;
  return out;
}

ConvexityReport verify_delta_convexity(const FiniteVolumeSpec& spec,
                                       const ThermoState& state,
                                       const CouplingParams& coupling,
                                       const std::vector<double>& delta_grid,
                                       Execution exec) {
  validate_spec(spec);
  if (delta_grid.size() < 3)
    throw DomainError("delta convexity: need at least three grid points");
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] >= 0.0) || !std::isfinite(delta_grid[i]))
      throw DomainError("delta convexity: grid values must be >= 0");
    if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
      throw DomainError("delta convexity: grid must be strictly increasing");
  }

  const auto solve_at = [&](double delta) {
    FiniteVolumeSpec local = spec;
    local.gap.delta = delta;
    return grand_canonical_solve(local, state, coupling, exec);
  };

  ConvexityReport report;
  for (const double delta : delta_grid) {
    const auto result = solve_at(delta);
    report.pressures.push_back(result.pressure);
    report.condensates.push_back(result.condensate);
  }
  const double p0 =
      delta_grid[0] == 0.0 ? report.pressures[0] : solve_at(0.0).pressure;

  double monotone = std::numeric_limits<double>::infinity();
  double convex = std::numeric_limits<double>::infinity();
  double quotient = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < delta_grid.size(); ++i)
    monotone = std::min(monotone, report.pressures[i] - report.pressures[i - 1]);
  for (std::size_t i = 1; i + 1 < delta_grid.size(); ++i) {
    const double left = (report.pressures[i] - report.pressures[i - 1]) /
                        (delta_grid[i] - delta_grid[i - 1]);
    const double right = (report.pressures[i + 1] - report.pressures[i]) /
                         (delta_grid[i + 1] - delta_grid[i]);
    convex = std::min(convex, right - left);
  }
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (delta_grid[i] == 0.0) continue;
    const double q = (report.pressures[i] - p0) / delta_grid[i];
    quotient = std::min(quotient, report.condensates[i] - q);
  }
  report.min_monotone_margin = monotone;
  report.min_convexity_margin = convex;
  report.min_quotient_margin = quotient;
  report.pass = monotone >= -1e-12 && convex >= -1e-10 && quotient >= -1e-10;
  return report;
}

}  // namespace beckit
