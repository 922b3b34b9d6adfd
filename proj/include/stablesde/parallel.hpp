#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace stablesde {

// Runs fn(shard) for every shard index on up to `workers` threads. Each
// shard must write only to its own output slot; merging in shard order is
// the caller's job, which keeps results independent of the worker count.
inline void run_sharded(std::size_t n_shards, unsigned workers,
                        const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n_shards <= 1) {
    for (std::size_t s = 0; s < n_shards; ++s) fn(s);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t s = next.fetch_add(1);
      if (s >= n_shards) return;
      try {
        fn(s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n_threads = std::min<std::size_t>(workers, n_shards);
  pool.reserve(n_threads);
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace stablesde
