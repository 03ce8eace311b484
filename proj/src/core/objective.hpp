#pragma once

#include "core/common.hpp"
#include "core/distributions.hpp"
#include "core/periodic.hpp"
#include "core/predictors.hpp"

#include <cstdint>
#include <optional>

namespace plateau {

// The learning problem: minimize over w
//   F(w) = E_{x ~ mixture} (f(w, x) - psi(<w_star, x>))^2.
struct Problem {
  GaussianMixture mixture;
  PeriodicFn psi;
  Vec w_star;
  PredictorFamily family;

  Problem(GaussianMixture mix, PeriodicFn target, Vec wstar, PredictorFamily fam);

  int dim() const { return mixture.dim(); }
  double target(const Vec& x) const { return psi(w_star.dot(x)); }

  // Closed form exists for cosine family + cosine target + zero-mean
  // Gaussian mixture.
  bool has_closed_form() const;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

struct VecEstimate {
  Vec value;
  Vec std_error;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
};

// Monte-Carlo mean of squared residuals. Sample i comes from stream
// (seed, i), so estimates at different w under the same seed share the
// same draws (common random numbers).
Estimate objective_mc(const Problem& problem, const Vec& w, std::int64_t n, std::uint64_t seed);

// MC mean of 2 (f(w,x) - target(x)) grad_w f(w,x), per-coordinate errors.
VecEstimate grad_mc(const Problem& problem, const Vec& w, std::int64_t n, std::uint64_t seed);

// E (cos(2 pi <w,x>) - cos(2 pi <w*,x>))^2 for x ~ N(0, cov), by the
// characteristic-function identity E cos(2 pi <a,x>) = exp(-2 pi^2 a^T cov a).
double objective_cos_gauss_closed(const Vec& w, const Vec& w_star, const Mat& cov);
Vec grad_cos_gauss_closed(const Vec& w, const Vec& w_star, const Mat& cov);

// Mixture versions (weighted over zero-mean components); throws
// `unsupported` when the problem has no closed form.
double objective_closed(const Problem& problem, const Vec& w);
Vec grad_closed(const Problem& problem, const Vec& w);

struct GridSpec {
  double lo = -3.0;
  double hi = 3.0;
  int n = 201;  // points per axis, inclusive of both ends

  double coord(int i) const { return lo + (hi - lo) * i / (n - 1); }
};

// F over a 2-D grid of w; closed form when available, otherwise MC with
// common random numbers across cells. result(i, j) = F((coord(i), coord(j))).
Mat landscape_grid(const Problem& problem, const GridSpec& spec,
                   std::optional<std::int64_t> mc_samples = std::nullopt,
                   std::uint64_t seed = 0);

}  // namespace plateau
