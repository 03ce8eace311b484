#include "core/parallel.hpp"

#include <atomic>
#include <thread>

namespace plateau {

namespace {
std::atomic<int> g_workers{0};
}

void set_workers(int w) { g_workers.store(w < 0 ? 0 : w); }

int workers() {
  int w = g_workers.load();
  if (w == 0) {
    w = static_cast<int>(std::thread::hardware_concurrency());
    if (w <= 0) w = 1;
  }
  return w;
}

void chunked_run(std::int64_t n, std::int64_t chunk,
                 const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body,
                 const std::function<void(std::int64_t)>& merge) {
  if (n <= 0) return;
  const std::int64_t nchunks = chunk_count(n, chunk);
  const int nthreads = static_cast<int>(std::min<std::int64_t>(workers(), nchunks));

  if (nthreads <= 1) {
    for (std::int64_t c = 0; c < nchunks; ++c) {
      const std::int64_t lo = c * chunk;
      const std::int64_t hi = std::min(n, lo + chunk);
      body(lo, hi, c);
      if (merge) merge(c);
    }
    return;
  }

  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      const std::int64_t lo = c * chunk;
      const std::int64_t hi = std::min(n, lo + chunk);
      body(lo, hi, c);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (merge) {
    for (std::int64_t c = 0; c < nchunks; ++c) merge(c);
  }
}

}  // namespace plateau
