#include "core/rng.hpp"

#include <cmath>
#include <vector>

namespace plateau {

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * kPi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

void RandomStream::fill_normal(double* out, int n) {
  for (int i = 0; i < n; ++i) out[i] = normal();
}

Vec RandomStream::normal_vec(int n) {
  Vec v(n);
  fill_normal(v.data(), n);
  return v;
}

int RandomStream::pick_cumulative(const std::vector<double>& cumulative) {
  const double u = uniform01();
  int lo = 0;
  int hi = static_cast<int>(cumulative.size()) - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (u <= cumulative[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

Vec sphere_point(int dim, double radius, RandomStream& rs) {
  if (dim < 1) throw invalid_argument("sphere_point: dim must be >= 1");
  if (!(radius > 0.0)) throw invalid_argument("sphere_point: radius must be > 0");
  Vec z = rs.normal_vec(dim);
  double nrm = z.norm();
  while (nrm == 0.0) {  // measure-zero, but keep the contract total
    z = rs.normal_vec(dim);
    nrm = z.norm();
  }
  return (radius / nrm) * z;
}

Mat sphere_points(int dim, double radius, int n, std::uint64_t seed) {
  Mat out(n, dim);
  for (int i = 0; i < n; ++i) {
    RandomStream rs(seed, static_cast<std::uint64_t>(i));
    out.row(i) = sphere_point(dim, radius, rs).transpose();
  }
  return out;
}

}  // namespace plateau
