#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nmfcheck {

/// Worker cap for replicate-level parallelism. Results never depend on it.
struct Execution {
  unsigned threads = 1;

  static Execution serial() { return {1}; }
  static Execution hardware() {
    return {std::max(1u, std::thread::hardware_concurrency())};
  }
};

/// Runs body(i) for i in [0, n) on up to `exec.threads` workers. Each index
/// runs exactly once; callers write results into slot i so that reduction
/// order stays fixed. If any bodies throw, the exception from the lowest
/// index is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t n, Execution exec, Body&& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, exec.threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_index = n;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nmfcheck
