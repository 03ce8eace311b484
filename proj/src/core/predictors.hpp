#pragma once

#include "core/common.hpp"
#include "core/distributions.hpp"

#include <cstdint>
#include <limits>
#include <string>

namespace plateau {

// Parametric predictor family (w, x) -> f(w, x) with analytic parameter
// gradient. Parameters are a flat vector; for networks the layout is W
// column-major, then b, then v, then c.
//
// Subgradient convention at kinks: d/dz [z]_+ is 0 at z = 0, and the
// clip derivative is 0 at both boundaries.
class PredictorFamily {
 public:
  enum class Kind { Cosine, ClippedReluSum, OneHiddenRelu };

  static PredictorFamily cosine(int dim);
  static PredictorFamily clipped_relu_sum(int dim, int units);
  static PredictorFamily one_hidden_relu(int dim, int hidden);
  static PredictorFamily from_json(const std::string& text, int dim);
  std::string to_json() const;

  Kind kind() const { return kind_; }
  int input_dim() const { return dim_; }
  int units() const { return units_; }
  int param_dim() const;

  double predict(const Vec& params, const Vec& x) const;
  void grad_params(const Vec& params, const Vec& x, Vec& out) const;
  Vec grad_params(const Vec& params, const Vec& x) const {
    Vec g(param_dim());
    grad_params(params, x, g);
    return g;
  }

 private:
  PredictorFamily(Kind k, int dim, int units) : kind_(k), dim_(dim), units_(units) {}
  void check_dims(const Vec& params, const Vec& x) const;

  Kind kind_;
  int dim_;
  int units_;  // n for ClippedReluSum, k for OneHiddenRelu, unused for Cosine
};

// x -> clip_[0,1]( sum_i [ <w_i, x> ]_+ ), columns w_i of W.
struct ClippedReluSum {
  Mat W;  // d x n

  explicit ClippedReluSum(Mat weights);
  int dim() const { return static_cast<int>(W.rows()); }
  int units() const { return static_cast<int>(W.cols()); }
  double eval(const Vec& x) const;

  PredictorFamily family() const { return PredictorFamily::clipped_relu_sum(dim(), units()); }
  Vec params() const;  // column-major flatten
};

// One-hidden-layer ReLU network x -> v^T [W^T x + b]_+ + c.
struct OneHiddenReluNet {
  Mat W;  // d x k
  Vec b;  // k
  Vec v;  // k
  double c = 0.0;

  OneHiddenReluNet(Mat W_, Vec b_, Vec v_, double c_);
  static OneHiddenReluNet from_json(const std::string& text);
  std::string to_json() const;

  int dim() const { return static_cast<int>(W.rows()); }
  int hidden() const { return static_cast<int>(W.cols()); }
  double eval(const Vec& x) const;

  PredictorFamily family() const { return PredictorFamily::one_hidden_relu(dim(), hidden()); }
  Vec params() const;
};

// Monte-Carlo estimate of G_w = E_{x ~ mixture} || d/dw f(w, x) ||^2.
struct GradNormBound {
  double value = 0.0;      // MC mean
  double std_error = 0.0;
  std::int64_t n = 0;
  // Analytic majorant when available (cosine family: 4 pi^2 E||x||^2);
  // NaN otherwise.
  double analytic_bound = std::numeric_limits<double>::quiet_NaN();
};

GradNormBound estimate_grad_norm_bound(const PredictorFamily& family, const Vec& w,
                                       const GaussianMixture& mixture, std::int64_t n,
                                       std::uint64_t seed);

// Exact G_w for the cosine family under a zero-mean Gaussian mixture:
// 2 pi^2 sum_i alpha_i (tr S_i - (tr S_i - 16 pi^2 ||S_i w||^2) e^{-8 pi^2 w^T S_i w}).
double cosine_grad_norm_exact(const Vec& w, const GaussianMixture& mixture);

}  // namespace plateau
