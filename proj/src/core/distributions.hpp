#pragma once

#include "core/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace plateau {

// One Gaussian component of an input density. The covariance is kept in
// full form with its Cholesky factor and eigenvalues cached; the compact
// form it was specified in (iso/diag/full) is remembered for round-trips.
struct GaussianComponent {
  enum class CovForm { Iso, Diag, Full };

  Vec mean;
  Mat cov;
  double weight = 1.0;

  Mat chol;           // lower triangular, cov = chol * chol^T
  Vec cov_eigvals;    // ascending
  double log_norm = 0.0;  // -(d/2) log(2 pi) - (1/2) log det cov
  CovForm form = CovForm::Full;

  static GaussianComponent make(Vec mean, Mat cov, double weight,
                                CovForm form = CovForm::Full);
  int dim() const { return static_cast<int>(mean.size()); }
  double density(const Vec& x) const;
};

// Monotone non-increasing tail profile r -> eps(r) in [0, 1].
struct ConcentrationProfile {
  std::function<double(double)> eval;
  std::string tag;

  double operator()(double r) const {
    if (r < 0.0) throw invalid_argument("ConcentrationProfile: r must be >= 0");
    return eval(r);
  }
};

// Truncated series sum_{n=1}^{n_max} eps(n r) with a certified geometric
// majorant for the dropped tail (valid for profiles whose successive
// ratios eps((n+1)r)/eps(nr) are non-increasing, as for Gaussian shapes).
struct TailSum {
  double partial = 0.0;
  double remainder_bound = 0.0;
  double value() const { return partial + remainder_bound; }
};

TailSum bound_tail_sum(const ConcentrationProfile& profile, double r, int n_max);

class GaussianMixture {
 public:
  GaussianMixture(std::vector<GaussianComponent> components, int dim);

  static GaussianMixture standard(int dim);
  static GaussianMixture from_json(const std::string& text);
  std::string to_json() const;

  int dim() const { return dim_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

  // n i.i.d. draws, one row per draw. Sample i is generated from stream
  // (seed, i), so the result is bit-identical for any worker count.
  Mat sample(std::int64_t n, std::uint64_t seed) const;
  void sample_into(double* out, std::int64_t n, std::uint64_t seed) const;

  // One draw from an already-positioned stream (used by estimators that
  // interleave other consumption on the same per-index stream).
  void draw(class RandomStream& rs, Vec& out) const;

  double density(const Vec& x) const;

  // Fourier tail ratio ||phihat 1_{>=r}|| / ||phihat|| of one component's
  // square-root density. Translation only changes the phase of phihat, so
  // the profile depends on the covariance alone.
  ConcentrationProfile epsilon_profile(int component) const;
  // Pointwise worst case over components; every component is
  // eps(r)-concentrated with this single profile.
  ConcentrationProfile epsilon_profile() const;

  // Analytic moments (used by tests and by gradient-norm bounds).
  Vec mean() const;
  Mat covariance() const;
  double second_moment() const;  // E ||x||^2

  // CDF of <u, x> at t; the projection is a 1-D Gaussian mixture.
  double projected_cdf(const Vec& u, double t) const;

 private:
  std::vector<GaussianComponent> components_;
  std::vector<double> cum_weights_;
  int dim_;
};

}  // namespace plateau
