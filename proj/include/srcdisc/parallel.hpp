#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace srcdisc {

/// Worker count from SRCDISC_WORKERS, falling back to the hardware count.
inline int default_worker_count() {
  if (const char* env = std::getenv("SRCDISC_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Run fn(i) for i in [0, n) over contiguous per-worker blocks. Each index
/// writes only its own output slot, so results do not depend on the worker
/// count or scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nworkers = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(nworkers);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < nworkers; ++w) {
    const std::size_t begin = n * w / nworkers;
    const std::size_t end = n * (w + 1) / nworkers;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace srcdisc
