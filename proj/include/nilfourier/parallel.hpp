#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace nilfourier {

/// Runs fn(i) for i in [0, n) on `workers` threads pulling indices from a
/// shared counter. Results must go to disjoint, preallocated slots so the
/// output is identical for any worker count. The first exception thrown by a
/// worker is rethrown on the calling thread.
inline void parallel_for(std::int64_t n, int workers,
                         const std::function<void(std::int64_t)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || n <= 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  auto body = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true)) error = std::current_exception();
        return;
      }
    }
  };
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nilfourier
