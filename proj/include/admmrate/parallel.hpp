#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace admmrate {

// Worker count for grid fan-out; 0 means available hardware parallelism.
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Work items are
// claimed dynamically; callers write results into pre-sized slots indexed by
// i, so output order never depends on scheduling. The first exception thrown
// by any item is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace admmrate
