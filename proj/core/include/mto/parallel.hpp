#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mto {

// Worker count: MTO_THREADS if set (>=1), else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("MTO_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Runs fn(chunk) for chunk = 0..num_chunks-1 on up to worker_count() threads.
// The chunk decomposition is fixed by the caller, so results are identical
// for any thread count as long as fn derives its randomness from the chunk
// index alone and writes only to per-chunk slots.
inline void parallel_chunks(std::size_t num_chunks,
                            const std::function<void(std::size_t)>& fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || num_chunks <= 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&]() {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= num_chunks) break;
      fn(c);
    }
  };
  std::vector<std::thread> pool;
  unsigned n = std::min<std::size_t>(workers, num_chunks);
  pool.reserve(n - 1);
  for (unsigned t = 0; t + 1 < n; ++t) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
}

}  // namespace mto
