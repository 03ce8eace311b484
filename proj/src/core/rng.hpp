#pragma once

#include "core/common.hpp"

#include <cstdint>

namespace plateau {

// Counter-addressable random streams. Every (seed, stream index) pair
// names an independent stream, so sample i of a Monte-Carlo run can be
// produced by any worker and the result never depends on the thread
// layout. splitmix64 is used both as the mixer and as the generator.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : state_(mix64(mix64(seed) ^ mix64(stream ^ 0xd1b54a32d192ed03ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]; never returns 0 so log() is safe.
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller pair; the second value is cached.
  double normal();

  void fill_normal(double* out, int n);
  Vec normal_vec(int n);

  // Index into a cumulative weight table (strictly increasing, last = 1).
  int pick_cumulative(const std::vector<double>& cumulative);

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Uniform direction scaled to the given radius; ||row|| == radius up to
// one rounding of the normalization.
Vec sphere_point(int dim, double radius, RandomStream& rs);

// n draws, one row per draw, each addressed as stream (seed, i).
Mat sphere_points(int dim, double radius, int n, std::uint64_t seed);

}  // namespace plateau
