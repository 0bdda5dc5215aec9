#pragma once

#include <cstddef>

namespace yflow {

/// Number of threads used by pointwise kernels. Reductions never depend on it.
void set_num_threads(int threads);
int num_threads();

namespace detail {

// Grids below this size are processed on the calling thread only.
inline constexpr std::size_t kParallelThreshold = 2048;

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold)
  for (long long i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace detail
}  // namespace yflow
