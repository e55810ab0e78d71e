#pragma once

#include <cstddef>
#include <vector>

#ifdef RIGIDLAB_HAS_OPENMP
#include <omp.h>
#endif

namespace rigidlab {

inline int max_threads() {
#ifdef RIGIDLAB_HAS_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef RIGIDLAB_HAS_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

// Parallel loop over [0, n). The body must only write to disjoint slots.
template <class F>
void parallel_for(int n, F&& body) {
#ifdef RIGIDLAB_HAS_OPENMP
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) body(i);
#else
  for (int i = 0; i < n; ++i) body(i);
#endif
}

template <class F>
void serial_for(int n, F&& body) {
  for (int i = 0; i < n; ++i) body(i);
}

// Pairwise summation; result does not depend on thread count.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return v.empty() ? 0.0 : pairwise_sum(v.data(), v.size());
}

// Evaluates term(i) for i in [0,n) in parallel, then reduces with a
// deterministic pairwise sum. `parallel=false` gives the serial reference
// path; both produce bit-identical results.
template <class F>
double map_sum(int n, F&& term, bool parallel = true) {
  std::vector<double> buf(static_cast<std::size_t>(n > 0 ? n : 0));
  if (parallel) {
    parallel_for(n, [&](int i) { buf[i] = term(i); });
  } else {
    serial_for(n, [&](int i) { buf[i] = term(i); });
  }
  return pairwise_sum(buf);
}

}  // namespace rigidlab
