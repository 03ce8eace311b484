#pragma once

#include "core/common.hpp"

#include <cmath>
#include <functional>

namespace plateau::testing {

// Adaptive Simpson; independent quadrature oracle for tails and Fourier
// coefficients. Refinement stops once the local correction is below
// 15 * (rel_tol * |estimate| + abs_tol); the absolute floor matters for
// integrals that cancel to ~0.
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double rel_tol,
                                   double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 ||
      std::abs(delta) <= 15.0 * (rel_tol * std::abs(left + right) + abs_tol)) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, rel_tol, 0.5 * abs_tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, rel_tol, 0.5 * abs_tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-12, double abs_tol = 1e-14, int depth = 40) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, depth);
}

// Central finite difference of a scalar function of a vector.
inline Vec central_diff(const std::function<double(const Vec&)>& f, const Vec& w,
                        double step = 1e-5) {
  Vec g(w.size());
  Vec p = w;
  for (int i = 0; i < w.size(); ++i) {
    const double save = p[i];
    p[i] = save + step;
    const double hi = f(p);
    p[i] = save - step;
    const double lo = f(p);
    p[i] = save;
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace plateau::testing
