#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace lsnif {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(worker, begin, end) on contiguous slices of [0, n). With a single
// worker everything runs on the calling thread, which keeps the
// deterministic single-worker mode trivial.
inline void parallel_slices(long n, int workers,
                            const std::function<void(int, long, long)>& fn) {
  workers = resolve_workers(workers);
  if (n <= 0) return;
  if (workers > n) workers = static_cast<int>(n);
  if (workers == 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long begin = w * chunk;
    const long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace lsnif
