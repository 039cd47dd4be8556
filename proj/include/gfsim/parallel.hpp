#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace gfsim {

unsigned default_workers();

/// Runs fn(i) for i in [0, n) on `workers` threads. Work items are claimed
/// dynamically; callers store results by index so the outcome never depends
/// on scheduling. The first exception is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, unsigned workers, F fn) {
  std::vector<T> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace gfsim
