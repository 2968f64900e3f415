#pragma once

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ranklimits {

// Thread-count resolution: an explicit positive request wins, then the
// RANKLIMITS_THREADS environment variable, then hardware concurrency.
// Always at least 1.
inline int resolve_threads(int requested) {
  if (requested < 0) throw std::invalid_argument("resolve_threads: negative thread count");
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RANKLIMITS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 4096) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Run fn(i) for i in [begin, end) over contiguous index blocks. Callers must
// write results into per-index slots; since every iteration is a pure
// function of its index, the block split cannot change what gets computed,
// only how fast. Reductions happen afterwards in index order.
template <class Fn>
void parallel_for(int begin, int end, int threads, Fn&& fn) {
  const int count = end - begin;
  if (count <= 0) return;
  threads = std::min(std::max(threads, 1), count);
  if (threads == 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const int base = count / threads;
  const int extra = count % threads;
  int lo = begin;
  for (int t = 0; t < threads; ++t) {
    const int hi = lo + base + (t < extra ? 1 : 0);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
    lo = hi;
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace ranklimits
