#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdint>

namespace stomech {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Parallel loop over independent work items (typically path indices).
// Results must be written to per-index slots so that the output is identical
// to the serial loop regardless of thread count.
template <class F>
void parallel_for(int64_t n, F&& fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) fn(i);
#else
  for (int64_t i = 0; i < n; ++i) fn(i);
#endif
}

// Serial reference loop. Kept separate so tests and the benchmark can compare
// the OpenMP kernels against it directly.
template <class F>
void serial_for(int64_t n, F&& fn) {
  for (int64_t i = 0; i < n; ++i) fn(i);
}

}  // namespace stomech
