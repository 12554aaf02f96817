#pragma once

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace obhmc {

/// Runs fn(i) for i in [0, n) across up to `workers` threads (hardware
/// concurrency when 0). fn must not throw; callers record per-index
/// failures themselves. Results go into per-index slots, so the outcome is
/// independent of scheduling.
template <class Fn>
void parallel_for_index(int n, Fn&& fn, unsigned workers = 0) {
  if (n <= 0) return;
  unsigned w = workers != 0 ? workers : std::max(1u, std::thread::hardware_concurrency());
  w = std::min<unsigned>(w, static_cast<unsigned>(n));
  if (w <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (unsigned t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace obhmc
