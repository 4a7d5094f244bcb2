// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal fork-join helper. Work is split into contiguous index ranges so
// results written per index are identical for any thread count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace roadex {

namespace detail {
inline std::atomic<unsigned>& thread_limit_storage() {
  static std::atomic<unsigned> limit{0};
  return limit;
}
}  // namespace detail

/// Caps worker threads used by library algorithms. 0 means hardware concurrency.
inline void set_thread_limit(unsigned n) { detail::thread_limit_storage() = n; }

inline unsigned thread_limit() {
  const unsigned limit = detail::thread_limit_storage();
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return limit == 0 ? hw : limit;
}

/// Calls fn(begin, end) over disjoint ranges covering [0, n).
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t min_grain = 1024) {
  const std::size_t workers =
      std::min<std::size_t>(thread_limit(), std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_grain)));
  if (workers <= 1 || n == 0) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t step = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * step;
    const std::size_t e = std::min(n, b + step);
    if (b >= e) break;
    threads.emplace_back([&, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace roadex
