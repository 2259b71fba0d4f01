#pragma once

// Exception-safe OpenMP loop. The first exception thrown by any iteration is
// rethrown on the calling thread after the loop; remaining iterations still
// run but their exceptions are dropped.

#include <cstddef>
#include <exception>
#include <mutex>

namespace heine {

// 0 leaves the OpenMP default alone.
void set_thread_count(int threads);
int thread_count();

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::exception_ptr error;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long idx = 0; idx < count; ++idx) {
    try {
      fn(static_cast<std::size_t>(idx));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace heine
