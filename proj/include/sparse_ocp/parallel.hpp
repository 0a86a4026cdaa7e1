#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace sparse_ocp {

/// Serial reference loop; the OpenMP path must reproduce it exactly.
template <class Fn>
void for_each_index_serial(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

/// Runs fn(i) for i in [0, n) on `workers` OpenMP threads. Each index must
/// only write its own output slot; the first exception is rethrown after the
/// loop.
template <class Fn>
void for_each_index(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1) {
    for_each_index_serial(n, fn);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace sparse_ocp
