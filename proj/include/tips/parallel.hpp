#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace tips {

// Default worker count: the TIPS_WORKERS environment variable if set,
// otherwise 1. Results never depend on the worker count; it only sets how
// index ranges are split across threads.
inline int default_workers() {
  if (const char* env = std::getenv("TIPS_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 64);
  }
  return 1;
}

// Runs fn(i) for i in [0, n) split into contiguous blocks, one per worker.
// Each index writes only its own output slot, so any worker count produces
// identical results. The first exception (by block order) is rethrown.
template <typename F>
void parallel_for(long n, int workers, F&& fn) {
  if (n <= 0) return;
  const int w = std::max(1, std::min<long>(workers, n) > 64
                                ? 64
                                : static_cast<int>(std::min<long>(workers, n)));
  if (w <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::thread> pool;
  pool.reserve(w);
  const long chunk = (n + w - 1) / w;
  for (int t = 0; t < w; ++t) {
    const long lo = static_cast<long>(t) * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, t, lo, hi]() {
      try {
        for (long i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tips
