#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace socv {

/// Parallel execution policy. Work is split over paths; every reduction in
/// the library accumulates in a fixed order, so results are bitwise
/// independent of the thread count.
struct ParallelConfig {
  int threads = 1;
};

/// Runs fn(begin..end) over disjoint index ranges on cfg.threads threads.
/// fn must only write to per-index slots (no shared accumulation).
template <typename Fn>
void parallel_for(const ParallelConfig& cfg, int count, Fn&& fn) {
  const int threads = std::max(1, cfg.threads);
  if (threads == 1 || count < 2 * threads) {
    fn(0, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace socv
