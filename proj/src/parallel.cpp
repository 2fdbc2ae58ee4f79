#include "beckit/parallel.hpp"

#include <cstdlib>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace beckit {

int effective_threads() {
#if defined(_OPENMP)
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("BEC_KIT_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0 && cap < n) n = static_cast<int>(cap);
  }
  return n;
#else
  return 1;
#endif
}

bool openmp_enabled() {
#if defined(_OPENMP)
  return true;
#else
  return false;
#endif
}

namespace {
constexpr std::int64_t kBlock = 4096;
}

double block_sum(const double* x, std::int64_t n, Execution exec) {
  if (n <= 0) return 0.0;
  const std::int64_t nblk = (n + kBlock - 1) / kBlock;
  if (nblk == 1) {
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::vector<double> partial(static_cast<std::size_t>(nblk));
  for_index(nblk, exec, [&](std::int64_t b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = (lo + kBlock < n) ? lo + kBlock : n;
    double s = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) s += x[i];
    partial[static_cast<std::size_t>(b)] = s;
  });
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

double block_sum(const std::vector<double>& x, Execution exec) {
  return block_sum(x.data(), static_cast<std::int64_t>(x.size()), exec);
}

}  // namespace beckit
