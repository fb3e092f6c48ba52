#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hysterix {

// Batch loops (random instance sweeps, sampled test-function families, FD
// probes) are data parallel: every iteration writes only its own slot.
// Exec::Parallel runs them under OpenMP when available; Exec::Serial is the
// reference path the tests compare against. Results are required to be
// bitwise identical, which holds because reductions are done serially on the
// stored per-index results.
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

template <class F>
void parallel_for(Exec mode, std::size_t n, F&& body) {
#ifdef _OPENMP
  if (mode == Exec::Parallel) {
    #pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#else
  (void)mode;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace hysterix
