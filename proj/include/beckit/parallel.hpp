#ifndef BECKIT_PARALLEL_HPP
#define BECKIT_PARALLEL_HPP

#include <cstdint>
#include <vector>

namespace beckit {

// Backend selector. Every kernel has a serial reference path; the parallel
// path performs the same arithmetic in the same order (slot writes plus
// fixed-block reductions), so results are bitwise identical between the two.
enum class Execution { serial, parallel };

// Thread count the parallel backend uses: OpenMP's default, capped by the
// BEC_KIT_THREADS environment variable when set to a positive integer.
// Returns 1 when built without OpenMP.
int effective_threads();

bool openmp_enabled();

// Runs body(i) for i in [0, n). Bodies must only write state owned by index i.
template <class Body>
void for_index(std::int64_t n, Execution exec, Body&& body) {
#if defined(_OPENMP)
  if (exec == Execution::parallel && n > 1) {
    const int nt = effective_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
#else
  (void)exec;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Deterministic sum: fixed blocks of 4096 summed left-to-right, block partials
// again left-to-right. The block structure does not depend on thread count, so
// serial and parallel execution agree bitwise.
double block_sum(const double* x, std::int64_t n, Execution exec);
double block_sum(const std::vector<double>& x, Execution exec);

}  // namespace beckit

#endif
