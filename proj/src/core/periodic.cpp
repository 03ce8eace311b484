#include "core/periodic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace plateau {

using nlohmann::json;
using cplx = std::complex<double>;

std::complex<double> FourierCoeffs::eval_series(double t) const {
  cplx acc(0.0, 0.0);
  for (int z = -z_max; z <= z_max; ++z) {
    acc += a(z) * std::exp(cplx(0.0, 2.0 * kPi * z * t));
  }
  return acc;
}

double FourierCoeffs::sum_sq_moduli() const {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return s;
}

PeriodicFn::PeriodicFn(Kind k, std::vector<std::pair<double, double>> pts)
    : kind_(k), points_(std::move(pts)) {}

PeriodicFn PeriodicFn::cosine() { return PeriodicFn(Kind::Cosine, {}); }

PeriodicFn PeriodicFn::triangle() {
  return PeriodicFn(Kind::Triangle, {{0.0, 1.0}, {0.5, -1.0}});
}

PeriodicFn PeriodicFn::square() { return PeriodicFn(Kind::Square, {}); }

PeriodicFn PeriodicFn::piecewise_linear(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw invalid_argument("piecewise_linear: need >= 1 breakpoint");
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].first < 0.0 || points[i].first >= 1.0) {
      throw invalid_argument("piecewise_linear: breakpoints must lie in [0,1)");
    }
    if (i > 0 && points[i].first <= points[i - 1].first) {
      throw invalid_argument("piecewise_linear: breakpoints must be strictly ascending");
    }
    if (std::abs(points[i].second) > 1.0) {
      throw invalid_argument("piecewise_linear: values must lie in [-1,1]");
    }
  }
  return PeriodicFn(Kind::PiecewiseLinear, std::move(points));
}

PeriodicFn PeriodicFn::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("periodic JSON parse error: ") + e.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "cosine") return cosine();
  if (kind == "triangle") return triangle();
  if (kind == "square") return square();
  if (kind == "pl") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("points")) {
      pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    return piecewise_linear(std::move(pts));
  }
  throw invalid_argument("periodic JSON: unknown kind '" + kind + "'");
}

std::string PeriodicFn::to_json() const {
  json j;
  switch (kind_) {
    case Kind::Cosine:
      j["kind"] = "cosine";
      break;
    case Kind::Triangle:
      j["kind"] = "triangle";
      break;
    case Kind::Square:
      j["kind"] = "square";
      break;
    case Kind::PiecewiseLinear: {
      j["kind"] = "pl";
      json pts = json::array();
      for (const auto& p : points_) pts.push_back({p.first, p.second});
      j["points"] = std::move(pts);
      break;
    }
  }
  return j.dump();
}

namespace {
double wrap01(double t) {
  double f = t - std::floor(t);
  if (f >= 1.0) f = 0.0;  // guards against floor rounding at integers
  return f;
}
}  // namespace

double PeriodicFn::eval_pl(double t) const {
  const double tau = wrap01(t);
  const size_t n = points_.size();
  if (n == 1) return points_[0].second;
  // Locate the segment [t_i, t_{i+1}) containing tau; the wrap segment
  // runs from the last point to the first point shifted by one period.
  size_t i = 0;
  if (tau < points_[0].first) {
    // before the first breakpoint: inside the wrap segment
    const double t0 = points_[n - 1].first - 1.0;
    const double t1 = points_[0].first;
    const double v0 = points_[n - 1].second;
    const double v1 = points_[0].second;
    return v0 + (v1 - v0) * (tau - t0) / (t1 - t0);
  }
  while (i + 1 < n && points_[i + 1].first <= tau) ++i;
  double t0 = points_[i].first;
  double v0 = points_[i].second;
  double t1, v1;
  if (i + 1 < n) {
    t1 = points_[i + 1].first;
    v1 = points_[i + 1].second;
  } else {
    t1 = points_[0].first + 1.0;
    v1 = points_[0].second;
  }
  return v0 + (v1 - v0) * (tau - t0) / (t1 - t0);
}

double PeriodicFn::slope_after(double t) const {
  const double tau = wrap01(t);
  const size_t n = points_.size();
  if (n == 1) return 0.0;
  if (tau < points_[0].first) {
    const double t0 = points_[n - 1].first - 1.0;
    return (points_[0].second - points_[n - 1].second) / (points_[0].first - t0);
  }
  size_t i = 0;
  while (i + 1 < n && points_[i + 1].first <= tau) ++i;
  const double t0 = points_[i].first;
  const double v0 = points_[i].second;
  double t1, v1;
  if (i + 1 < n) {
    t1 = points_[i + 1].first;
    v1 = points_[i + 1].second;
  } else {
    t1 = points_[0].first + 1.0;
    v1 = points_[0].second;
  }
  return (v1 - v0) / (t1 - t0);
}

double PeriodicFn::operator()(double t) const {
  switch (kind_) {
    case Kind::Cosine:
      return std::cos(2.0 * kPi * t);
    case Kind::Square:
      return wrap01(t) < 0.5 ? 1.0 : -1.0;
    case Kind::Triangle:
    case Kind::PiecewiseLinear:
      return eval_pl(t);
  }
  return 0.0;
}

FourierCoeffs PeriodicFn::fourier_coeffs(int z_max) const {
  if (z_max < 1) throw invalid_argument("fourier_coeffs: z_max must be >= 1");
  FourierCoeffs fc;
  fc.z_max = z_max;
  fc.c.assign(2 * z_max + 1, cplx(0.0, 0.0));

  auto set = [&](int z, cplx v) { fc.c[z + z_max] = v; };

  switch (kind_) {
    case Kind::Cosine:
      set(1, cplx(0.5, 0.0));
      set(-1, cplx(0.5, 0.0));
      return fc;
    case Kind::Square:
      for (int z = -z_max; z <= z_max; ++z) {
        if (z == 0 || z % 2 == 0) continue;
        set(z, cplx(0.0, -2.0 / (kPi * z)));
      }
      return fc;
    case Kind::Triangle:
      for (int z = -z_max; z <= z_max; ++z) {
        if (z == 0 || z % 2 == 0) continue;
        set(z, cplx(4.0 / (kPi * kPi * z * z), 0.0));
      }
      return fc;
    case Kind::PiecewiseLinear:
      break;
  }

  // Exact segment integrals: for g(t) = a + b t on [t0, t1] and
  // c = -2 pi i z, integral g e^{ct} dt = [e^{ct}((a + b t)/c - b/c^2)].
  const size_t n = points_.size();
  for (int z = -z_max; z <= z_max; ++z) {
    cplx acc(0.0, 0.0);
    for (size_t i = 0; i < n; ++i) {
      const double t0 = points_[i].first;
      const double v0 = points_[i].second;
      const double t1 = (i + 1 < n) ? points_[i + 1].first : points_[0].first + 1.0;
      const double v1 = (i + 1 < n) ? points_[i + 1].second : points_[0].second;
      if (t1 <= t0) continue;
      const double b = (v1 - v0) / (t1 - t0);
      const double a = v0 - b * t0;
      if (z == 0) {
        acc += 0.5 * (v0 + v1) * (t1 - t0);
      } else {
        const cplx cc(0.0, -2.0 * kPi * z);
        auto anti = [&](double t, double g) {
          return std::exp(cc * t) * (g / cc - b / (cc * cc));
        };
        acc += anti(t1, a + b * t1) - anti(t0, a + b * t0);
      }
    }
    set(z, acc);
  }
  return fc;
}

double PeriodicFn::a0() const {
  switch (kind_) {
    case Kind::Cosine:
    case Kind::Square:
    case Kind::Triangle:
      return 0.0;
    case Kind::PiecewiseLinear:
      break;
  }
  double acc = 0.0;
  const size_t n = points_.size();
  for (size_t i = 0; i < n; ++i) {
    const double t0 = points_[i].first;
    const double v0 = points_[i].second;
    const double t1 = (i + 1 < n) ? points_[i + 1].first : points_[0].first + 1.0;
    const double v1 = (i + 1 < n) ? points_[i + 1].second : points_[0].second;
    acc += 0.5 * (v0 + v1) * (t1 - t0);
  }
  return acc;
}

double PeriodicFn::mean_square() const {
  switch (kind_) {
    case Kind::Cosine:
      return 0.5;
    case Kind::Square:
      return 1.0;
    case Kind::Triangle:
      return 1.0 / 3.0;
    case Kind::PiecewiseLinear:
      break;
  }
  // integral of (v0 + s u)^2 over each segment, u in [0, len]
  double acc = 0.0;
  const size_t n = points_.size();
  for (size_t i = 0; i < n; ++i) {
    const double t0 = points_[i].first;
    const double v0 = points_[i].second;
    const double t1 = (i + 1 < n) ? points_[i + 1].first : points_[0].first + 1.0;
    const double v1 = (i + 1 < n) ? points_[i + 1].second : points_[0].second;
    const double len = t1 - t0;
    if (len <= 0.0) continue;
    acc += len * (v0 * v0 + v0 * (v1 - v0) + (v1 - v0) * (v1 - v0) / 3.0);
  }
  return acc;
}

ReluNetwork1D PeriodicFn::as_relu_network(double lo, double hi) const {
  if (!is_piecewise_linear()) {
    throw unsupported("as_relu_network: only piecewise-linear kinds are representable");
  }
  if (!(lo < hi)) throw invalid_argument("as_relu_network: need lo < hi");

  // Knots of the periodic extension inside (lo, hi).
  std::vector<double> knots;
  const int k_lo = static_cast<int>(std::floor(lo)) - 1;
  const int k_hi = static_cast<int>(std::ceil(hi)) + 1;
  for (int k = k_lo; k <= k_hi; ++k) {
    for (const auto& p : points_) {
      const double tau = k + p.first;
      if (tau > lo && tau < hi) knots.push_back(tau);
    }
  }
  std::sort(knots.begin(), knots.end());

  ReluNetwork1D net;
  net.bias = (*this)(lo);
  double cur = slope_after(lo);
  net.units.push_back({cur, lo});
  for (double tau : knots) {
    const double next = slope_after(tau);
    if (next != cur) {
      net.units.push_back({next - cur, tau});
      cur = next;
    }
  }
  return net;
}

}  // namespace plateau
