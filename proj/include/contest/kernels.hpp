#pragma once

// Data-parallel kernels. Every kernel has a serial reference path; the
// OpenMP path must return bit-identical results, which the tests check.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "contest/core.hpp"

namespace contest::kernels {

struct ArgMax {
  std::size_t index = 0;
  double value = -std::numeric_limits<double>::infinity();
};

/// Ties go to the smallest index, so the result does not depend on how the
/// range is split across threads.
inline bool better(const ArgMax& a, const ArgMax& b) {
  return a.value > b.value || (a.value == b.value && a.index < b.index);
}

template <class ValueAt>
ArgMax argmax_serial(std::size_t count, ValueAt&& value_at) {
  ArgMax best;
  for (std::size_t k = 0; k < count; ++k) {
    const ArgMax here{k, value_at(k)};
    if (better(here, best)) best = here;
  }
  return best;
}

template <class ValueAt>
ArgMax argmax_parallel(std::size_t count, ValueAt&& value_at) {
#ifdef _OPENMP
  ArgMax best;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel
  {
    ArgMax local;
#pragma omp for schedule(static) nowait
    for (std::int64_t k = 0; k < n; ++k) {
      const ArgMax here{static_cast<std::size_t>(k),
                        value_at(static_cast<std::size_t>(k))};
      if (better(here, local)) local = here;
    }
#pragma omp critical(contest_argmax)
    if (better(local, best)) best = local;
  }
  return best;
#else
  return argmax_serial(count, value_at);
#endif
}

template <class ValueAt>
ArgMax argmax(std::size_t count, ValueAt&& value_at, Execution execution) {
  return execution == Execution::parallel ? argmax_parallel(count, value_at)
                                          : argmax_serial(count, value_at);
}

/// Evaluates fn(k) for k in [0, count) into a vector, in index order.
template <class T, class Fn>
std::vector<T> map_indexed(std::size_t count, Fn&& fn, Execution execution) {
  std::vector<T> out(count);
  if (execution == Execution::serial) {
    for (std::size_t k = 0; k < count; ++k) out[k] = fn(k);
    return out;
  }
  // Exceptions cannot cross the parallel region; the one from the lowest
  // index is rethrown, matching what the serial path would have thrown.
  std::exception_ptr error;
  std::size_t error_index = count;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < n; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    try {
      out[idx] = fn(idx);
    } catch (...) {
#pragma omp critical(contest_map_error)
      if (idx < error_index) {
        error_index = idx;
        error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace contest::kernels
