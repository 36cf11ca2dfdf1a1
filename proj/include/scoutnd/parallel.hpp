#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace scoutnd {

// Runs fn(index, slot) for index in [0, count) on up to `workers` threads.
// Slot identifies the worker (0..workers-1) so callers can keep per-worker
// resources. Results must be written into preallocated per-index storage;
// the first (lowest-index) exception is rethrown after all threads join.
inline void parallel_for(int count, int workers,
                         const std::function<void(int index, int slot)>& fn) {
  if (count <= 0) return;
  if (workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  int n_threads = std::min(workers, count);
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int slot = 0; slot < n_threads; ++slot) {
    pool.emplace_back([&, slot] {
      for (;;) {
        int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        try {
          fn(i, slot);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (int i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

}  // namespace scoutnd
