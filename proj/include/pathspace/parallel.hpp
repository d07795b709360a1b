#pragma once

// Fixed-partition fan-out over an index range. Each index writes only its own
// output slot, so results never depend on the number of workers; callers
// reduce the slots in index order afterwards.

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pathspace::parallel {

inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls body(i) for i in [0, count) on `workers` threads, contiguous blocks
/// per thread. The first exception thrown by any body is rethrown.
template <class Body>
void for_each_index(long count, int workers, Body&& body) {
  workers = static_cast<int>(std::max(1L, std::min<long>(resolve_workers(workers), count)));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const long lo = count * w / workers, hi = count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// out[i] = f(i) for every i, computed in parallel.
template <class T, class F>
std::vector<T> map_indices(long count, int workers, F&& f) {
  std::vector<T> out(count);
  for_each_index(count, workers, [&](long i) { out[i] = f(i); });
  return out;
}

}  // namespace pathspace::parallel
