#ifndef BECKIT_FINITE_VOLUME_HPP
#define BECKIT_FINITE_VOLUME_HPP

#include <cstdint>
#include <vector>

#include "beckit/ideal_gas.hpp"
#include "beckit/meanfield.hpp"
#include "beckit/parallel.hpp"

namespace beckit {

// Periodic box of side L: allowed momenta k = 2*pi*n/L, one-particle energy
// |k|^2, zero mode shifted down to -Delta.  The finite-volume runs are the
// exact oracle the closed-form thermodynamic limits are tested against.
struct FiniteVolumeSpec {
  double box_side = 0.0;
  double energy_cutoff = 0.0;
  int n_max = 0;  // canonical particle-number truncation
  int dim = 3;
  GapSpec gap{};
  std::int64_t mode_capacity = 200000;
  double tail_bound = 1e-8;
};

struct OccupationSpectrum {
  std::vector<double> energies;  // ascending; energies[0] = -Delta
  std::vector<std::int64_t> multiplicities;

  std::int64_t mode_count() const {
    std::int64_t total = 0;
    for (const auto m : multiplicities) total += m;
    return total;
  }
};

struct FiniteVolumeResult {
  double pressure = 0.0;
  double density = 0.0;
  double condensate = 0.0;
  double tail_weight = 0.0;  // normalized weight sitting at N = n_max
  std::int64_t mode_count = 0;
};

struct BogoliubovMargins {
  double pressure_difference = 0.0;
  double lower_margin = 0.0;
  double upper_margin = 0.0;
};

struct ConvexityReport {
  std::vector<double> pressures;
  std::vector<double> condensates;
  double min_monotone_margin = 0.0;
  double min_convexity_margin = 0.0;
  double min_quotient_margin = 0.0;
  bool pass = false;
};

// All momenta with |k|^2 <= energy_cutoff, grouped by energy.  Throws
// CapacityExceeded when the mode count would pass spec.mode_capacity.
OccupationSpectrum enumerate_modes(const FiniteVolumeSpec& spec);

// log Z_N for N = 0..n_max via the canonical recursion
//   Z_N = (1/N) sum_{j=1..N} Z_1(j beta) Z_{N-j},
// kept in the log domain throughout.  beta = 0 is allowed (counting measure).
std::vector<double> canonical_log_partition(const OccupationSpectrum& spectrum,
                                            double beta, int n_max,
                                            Execution exec = Execution::parallel);
std::vector<double> canonical_log_partition(const FiniteVolumeSpec& spec,
                                            double beta,
                                            Execution exec = Execution::parallel);

// Canonical zero-mode occupation <n_0>_N = sum_{j>=1} e^{j beta Delta}
// Z_{N-j} / Z_N, evaluated from a log-partition table.
double zero_mode_occupation(const std::vector<double>& log_z, double beta,
                            double delta, int n,
                            Execution exec = Execution::parallel);

// Grand-canonical mean-field solve: weights exp(beta mu N - beta g lambda
// N^2/(2V)) Z_N summed over total N.  Throws TruncationError when the
// normalized weight at N = n_max exceeds spec.tail_bound.
FiniteVolumeResult grand_canonical_solve(const FiniteVolumeSpec& spec,
                                         const ThermoState& state,
                                         const CouplingParams& coupling,
                                         Execution exec = Execution::parallel);

// Same, but picks n_max = ceil(3 V rho_mf) from the thermodynamic-limit
// density and doubles it (at most twice) if the tail check trips.
FiniteVolumeResult grand_canonical_solve_auto(FiniteVolumeSpec spec,
                                              const ThermoState& state,
                                              const CouplingParams& coupling,
                                              Execution exec = Execution::parallel);

// Pressure sandwich between two couplings lambda1 <= lambda2:
//   (g/V)<W>_2 <= p[lambda1] - p[lambda2] <= (g/V)<W>_1,
// W = (lambda2-lambda1) N^2 / (2V).  Margins should be >= -1e-12.
BogoliubovMargins verify_bogoliubov_pair(const FiniteVolumeSpec& spec,
                                         const ThermoState& state, double g,
                                         double lambda1, double lambda2,
                                         Execution exec = Execution::parallel);

// Pressure monotonicity/convexity in Delta on a grid, plus the difference-
// quotient bound (p(Delta) - p(0))/Delta <= condensate(Delta).
ConvexityReport verify_delta_convexity(const FiniteVolumeSpec& spec,
                                       const ThermoState& state,
                                       const CouplingParams& coupling,
                                       const std::vector<double>& delta_grid,
                                       Execution exec = Execution::parallel);

}  // namespace beckit

#endif
