#include "core/specfun.hpp"

#include "core/common.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace plateau {

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double chisq_tail(double dof, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double weighted_chisq_tail(const std::vector<double>& v, double t) {
  if (v.empty()) throw invalid_argument("weighted_chisq_tail: empty weights");
  for (double w : v) {
    if (!(w > 0.0)) throw invalid_argument("weighted_chisq_tail: weights must be > 0");
  }
  if (t <= 0.0) return 1.0;

  const int d = static_cast<int>(v.size());
  const double beta = *std::min_element(v.begin(), v.end());
  const double x = t / beta;

  bool equal = true;
  for (double w : v) {
    if (std::abs(w - beta) > 1e-15 * beta) {
      equal = false;
      break;
    }
  }
  if (equal) return chisq_tail(d, x);

  // Ruben coefficients: a_0 = prod sqrt(beta/v_i),
  // a_k = (1/2k) sum_{j=1..k} g_j a_{k-j}, g_j = sum_i (1 - beta/v_i)^j.
  // All a_k >= 0 and sum_k a_k = 1; truncation error is bounded by the
  // missing coefficient mass.
  std::vector<double> one_minus(d);
  double a0 = 1.0;
  for (int i = 0; i < d; ++i) {
    one_minus[i] = 1.0 - beta / v[i];
    a0 *= std::sqrt(beta / v[i]);
  }

  const int kMaxTerms = 200000;
  std::vector<double> a{a0};
  std::vector<double> g;  // g[j-1] = sum_i one_minus[i]^j
  std::vector<double> pw(one_minus);

  double mass = a0;
  double sum = a0 * chisq_tail(d, x);
  for (int k = 1; k < kMaxTerms; ++k) {
    double gk = 0.0;
    for (int i = 0; i < d; ++i) gk += pw[i];
    g.push_back(gk);
    for (int i = 0; i < d; ++i) pw[i] *= one_minus[i];

    double ak = 0.0;
    for (int j = 1; j <= k; ++j) ak += g[j - 1] * a[k - j];
    ak /= 2.0 * k;
    a.push_back(ak);

    mass += ak;
    sum += ak * chisq_tail(d + 2 * k, x);
    if (1.0 - mass < 1e-30) break;
  }
  return std::min(sum, 1.0);
}

const Quadrature& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[n - 1 - i] = q.weights[i];
  }
  return cache.emplace(n, std::move(q)).first->second;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw invalid_argument("fit_line: need >= 2 paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace plateau
