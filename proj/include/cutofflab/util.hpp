#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cutofflab {

inline int default_thread_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Applies fn to every item and collects results in input order, regardless
/// of the number of worker threads. fn must be safe to call concurrently.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, Fn fn, int threads)
    -> std::vector<decltype(fn(items.front()))> {
  using Out = decltype(fn(items.front()));
  std::vector<Out> results(items.size());
  if (items.empty()) return results;
  threads = std::max(1, std::min<int>(threads, static_cast<int>(items.size())));
  if (threads == 1) {
    for (size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }
  std::atomic<size_t> cursor{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const size_t i = cursor.fetch_add(1);
        if (i >= items.size()) return;
        try {
          results[i] = fn(items[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace cutofflab
