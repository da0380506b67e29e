#pragma once

#include <cstddef>
#include <cstdlib>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace caustica {

// Thread cap resolution order: explicit argument > CAUSTICA_THREADS env > OpenMP default.
// Returns the number of threads parallel regions will use.
int thread_count();

// Applies CAUSTICA_THREADS (if set) to the OpenMP runtime. Called once by the CLI
// and by the test mains; safe to call repeatedly.
void configure_threads_from_env();

// Sum of f(i) for i in [0, n) with a fixed chunked reduction order.
// Chunk partial sums are independent (parallelizable); the final combine is
// sequential in chunk index, so the result is bit-identical for any thread count.
template <typename F>
double deterministic_sum(std::size_t n, F&& f, std::size_t chunk = 4096) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    partial[static_cast<std::size_t>(c)] = s;
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace caustica
