#ifndef CHAINREP_PARALLEL_HPP
#define CHAINREP_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace chainrep {

// Worker-pool width. The CLI sets this from --jobs; library default is the
// hardware count clamped to 8. Results never depend on the value: every
// parallel loop writes to disjoint, index-addressed slots.
inline unsigned& worker_count() {
  static unsigned n = [] {
    unsigned h = std::thread::hardware_concurrency();
    if (h == 0) h = 1;
    return h > 8 ? 8u : h;
  }();
  return n;
}

template <typename Fn>
void parallel_for(uint64_t n, Fn&& fn) {
  unsigned jobs = worker_count();
  if (jobs <= 1 || n < 256) {
    for (uint64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<uint64_t> next{0};
  const uint64_t chunk = (n / (jobs * 8)) + 1;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        uint64_t lo = next.fetch_add(chunk);
        if (lo >= n) return;
        uint64_t hi = lo + chunk < n ? lo + chunk : n;
        for (uint64_t i = lo; i < hi; ++i) fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace chainrep

#endif
