#pragma once
// Trial-level worker pool.  Trials are embarrassingly parallel: each trial
// derives its randomness from (seed, trial_index, ...) and writes to its
// own output slot, so results do not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace phimoment {

// Resolution order: explicit request > PHIMOMENT_WORKERS > hardware.
inline int resolve_workers(int requested = 0) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PHIMOMENT_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// batch = trials handed to a worker per grab; 0 picks a size that keeps
// scheduling overhead negligible for cheap trial bodies.
inline void parallel_for_trials(long trials, int workers,
                                const std::function<void(long)>& body, long batch = 0) {
  workers = resolve_workers(workers);
  if (workers <= 1 || trials <= 1) {
    for (long t = 0; t < trials; ++t) body(t);
    return;
  }
  if (batch <= 0) batch = std::max<long>(1, trials / (64 * workers));
  std::atomic<long> next{0};
  auto run = [&] {
    for (long base = next.fetch_add(batch); base < trials; base = next.fetch_add(batch))
      for (long t = base; t < std::min(trials, base + batch); ++t) body(t);
  };
  std::vector<std::thread> pool;
  const int n_threads = static_cast<int>(std::min<long>(workers, trials));
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(run);
  for (auto& th : pool) th.join();
}

}  // namespace phimoment
