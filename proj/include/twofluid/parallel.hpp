#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace twofluid {

/// Below this many cells loops always run serially.
inline constexpr std::size_t kMinParallelCells = 4096;

/// Thread count from TWOFLUID_THREADS (0 or unset = hardware concurrency).
inline int threads_from_env() {
  int requested = 0;
  if (const char* s = std::getenv("TWOFLUID_THREADS")) requested = std::atoi(s);
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Chunks are contiguous, results do not depend on
/// the thread count. If several chunks throw, the lowest chunk's exception wins.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < kMinParallelCells) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto chunks = static_cast<std::size_t>(threads);
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t lo = n * c / chunks;
      const std::size_t hi = n * (c + 1) / chunks;
      pool.emplace_back([&, c, lo, hi] {
        try {
          for (std::size_t i = lo; i < hi; ++i) fn(i);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace twofluid
