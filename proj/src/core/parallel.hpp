#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace plateau {

// Global worker count. 0 means "use hardware concurrency". Outputs are
// identical for every setting: work is split into fixed-size chunks and
// per-chunk results are merged in chunk order.
void set_workers(int workers);
int workers();

inline constexpr std::int64_t kDefaultChunk = 8192;

// Runs body(chunk_begin, chunk_end, chunk_index) over [0, n) and then
// merge(chunk_index) sequentially in ascending chunk order.
void chunked_run(std::int64_t n, std::int64_t chunk,
                 const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body,
                 const std::function<void(std::int64_t)>& merge);

inline std::int64_t chunk_count(std::int64_t n, std::int64_t chunk) {
  return (n + chunk - 1) / chunk;
}

}  // namespace plateau
