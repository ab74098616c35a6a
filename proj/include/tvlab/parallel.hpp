#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace tvlab {

// Deterministic block-partitioned parallel map. The partition depends only
// on (n, nthreads), never on scheduling, so results are reproducible; any
// reductions must be done per-block and combined in block order.
template <typename Fn>
inline void parallel_for(long n, int nthreads, Fn&& fn) {
  if (nthreads <= 1 || n < 4096) {
    fn(0L, n);
    return;
  }
  const int t = std::min<long>(nthreads, std::max(1L, n / 4096));
  std::vector<std::thread> pool;
  pool.reserve(t);
  const long chunk = (n + t - 1) / t;
  for (int i = 0; i < t; ++i) {
    long lo = i * chunk;
    long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace tvlab
