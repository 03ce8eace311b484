#pragma once

#include "core/common.hpp"
#include "core/objective.hpp"
#include "core/specfun.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace plateau {

// n draws uniform on the sphere of the given radius, one per row.
Mat sample_wstar_sphere(int d, double radius, int n, std::uint64_t seed);

// How the probe point w is chosen for each dimension d.
struct ProbeRule {
  enum class Kind { Fixed, RandomUnitScaled };
  Kind kind = Kind::RandomUnitScaled;
  Vec fixed;           // used when kind == Fixed (length must match d)
  double scale = 1.0;  // used when kind == RandomUnitScaled

  Vec probe(int d, std::uint64_t seed) const;
};

struct VarianceScanConfig {
  std::vector<int> dims;
  std::vector<double> radii;  // r; target directions get norm 2r
  ProbeRule probe;
  int n_wstar = 200;
  std::int64_t n_x = 100000;  // per-gradient samples when MC gradients are used
  bool closed_form = true;    // use analytic gradients when the problem allows
  std::uint64_t seed = 1;
};

// One (d, r) cell of the scan. The variance is the trace of the
// empirical covariance of grad F(w) over the w_star draws, accumulated in
// extended precision because plateau gradients underflow double squaring.
struct VarianceCell {
  int d = 0;
  double r = 0.0;
  long double variance = 0.0L;
  double log_variance = 0.0;  // natural log; -inf if the variance is exactly 0
  double mc_floor = 0.0;      // split-half noise floor (0 for closed-form gradients)
  double bound_series = 0.0;  // sum_{n>=1} eps(n r) + certified remainder
  double exp_term = 0.0;      // exp(-d)
  double grad_norm_bound = 0.0;  // G_w at the probe
};

struct VarianceReport {
  std::vector<VarianceCell> cells;
  std::string csv() const;  // d,r,variance,mc_floor,bound_series,exp_term
};

// Builds the (cosine target, cosine family) problem over a standard
// Gaussian for each d and measures Var_{w_star}(grad F(w)).
VarianceReport variance_of_gradient(const VarianceScanConfig& config);

// Least-squares fit of log variance against r^2 for one dimension d.
LineFit decay_fit(const VarianceReport& report, int d);

struct CorrelationDecayResult {
  double lhs = 0.0;        // E_{w*} (E_x[q psi_w*] - a0 E_x[q])^2
  double lhs_closed = 0.0; // same quantity from per-draw closed forms (NaN if unavailable)
  double rhs = 0.0;        // 10 E[q^2] (exp(-d) + sum eps(n r))
  double noise_floor = 0.0;
};

// Probe test functions q for the correlation-decay estimate.
struct ProbeFunction {
  enum class Kind { CosineDirection, Constant };
  Kind kind = Kind::CosineDirection;
  Vec direction;       // q(x) = cos(2 pi <direction, x>)
  double constant = 1.0;

  double eval(const Vec& x) const;
  double second_moment(const GaussianMixture& mixture) const;  // E q^2
};

CorrelationDecayResult correlation_decay(const GaussianMixture& mixture, const PeriodicFn& psi,
                                         const ProbeFunction& q, int d, double r, int n_wstar,
                                         std::int64_t n_x, std::uint64_t seed);

}  // namespace plateau
