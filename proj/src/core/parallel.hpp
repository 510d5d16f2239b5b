#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace arcert::detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots by
/// the caller, which keeps the outcome independent of scheduling. If any
/// call throws, the exception of the lowest failing index is rethrown
/// through on_error(i, exception_ptr) (which must throw or rethrow).
template <typename Fn, typename OnError>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn, OnError&& on_error) {
  threads = std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};
  std::exception_ptr failure;
  std::mutex mu;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || i > first_failure.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < first_failure.load()) {
          first_failure.store(i);
          failure = std::current_exception();
        }
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) on_error(first_failure.load(), failure);
}

}  // namespace arcert::detail
