// Times the serial reference implementation against the parallel backend on
// the two hot kernels: the canonical partition recursion and a bound sweep.
// Both backends fill identical slot arrays and reduce in fixed blocks, so the
// results are required to agree bitwise; the benchmark checks that too.
//
// Usage: bench_kernels [scale]   (scale >= 1 grows the problem sizes)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "beckit/bound.hpp"
#include "beckit/finite_volume.hpp"
#include "beckit/parallel.hpp"
#include "beckit/potential.hpp"

using namespace beckit;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool same) {
  std::printf("%-22s serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   bitwise %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              same ? "equal" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  const int scale = argc > 1 ? std::atoi(argv[1]) : 1;
  std::printf("threads available: %d (openmp %s)\n", effective_threads(),
              openmp_enabled() ? "on" : "off");

  {
    FiniteVolumeSpec spec;
    spec.box_side = 8.0;
    spec.energy_cutoff = 40.0;
    spec.n_max = 4000 * scale;
    spec.dim = 3;
    spec.gap = {1.0, 0.0};
    const auto spectrum = enumerate_modes(spec);

    auto t0 = clock_type::now();
    const auto serial =
        canonical_log_partition(spectrum, 1.0, spec.n_max, Execution::serial);
    const double serial_ms = ms_since(t0);

    t0 = clock_type::now();
    const auto parallel =
        canonical_log_partition(spectrum, 1.0, spec.n_max, Execution::parallel);
    const double parallel_ms = ms_since(t0);

    bool same = serial.size() == parallel.size();
    for (std::size_t i = 0; same && i < serial.size(); ++i)
      same = serial[i] == parallel[i];
    report("partition recursion", serial_ms, parallel_ms, same);
  }

  {
    const GaussianPotential pot{1.0, 1.0};
    const int n = 400 * scale;
    std::vector<double> serial_vals(n), parallel_vals(n);

    const auto sweep = [&](Execution exec, std::vector<double>& out_vals) {
      for_index(n, exec, [&](std::int64_t i) {
        const double mu = 1.0 + 9.0 * static_cast<double>(i) / (n - 1);
        const auto rep = condensate_lower_bound({1.0, mu, 3}, 1.0, {25.0, 0.0},
                                                pot, RhoGaplessMode::rigorous());
        out_vals[i] = rep.lower_bound;
      });
    };

    auto t0 = clock_type::now();
    sweep(Execution::serial, serial_vals);
    const double serial_ms = ms_since(t0);

    t0 = clock_type::now();
    sweep(Execution::parallel, parallel_vals);
    const double parallel_ms = ms_since(t0);

    bool same = true;
    for (int i = 0; same && i < n; ++i) same = serial_vals[i] == parallel_vals[i];
    report("bound sweep", serial_ms, parallel_ms, same);
  }

  return 0;
}
