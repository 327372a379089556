#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace bridgelab {

/// Worker count: BRIDGELAB_THREADS if set and positive, else the hardware
/// concurrency (at least 1).
unsigned worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Results are
/// written by index, so output order never depends on scheduling. The first
/// exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace bridgelab
