#pragma once

#include "core/common.hpp"
#include "core/predictors.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace plateau {

using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Conjunction of integer linear threshold constraints over the Boolean
// cube: x -> AND_i ( <w_i, x> >= b_i ).
struct HalfspaceIntersection {
  IntMat weights;     // n x (d-1), row i = w_i
  IntVec thresholds;  // n

  HalfspaceIntersection(IntMat w, IntVec b);
  int n_halfspaces() const { return static_cast<int>(weights.rows()); }
  int input_dim() const { return static_cast<int>(weights.cols()); }
  double max_param_norm() const;  // max_i ||(w_i, b_i)||

  // x in {0,1}^{d-1}; anything else is rejected.
  int eval(const IntVec& x) const;

  static HalfspaceIntersection random(int input_dim, int n, std::int64_t weight_bound,
                                      std::uint64_t seed);
  static HalfspaceIntersection from_json(const std::string& text);
  std::string to_json() const;
};

// Clipped ReLU-sum network with integer weights, evaluated on
// {0,1}^{d-1} x {1} in integer arithmetic only. Columns are (-w_i, b_i),
// so the network computes the negated intersection exactly.
struct ClippedIntNetwork {
  IntMat columns;  // d x n

  int eval(const IntVec& x) const;  // x in {0,1}^d (last coordinate 1 in the reduction)
  ClippedReluSum to_double() const;
};

ClippedIntNetwork to_clipped_network(const HalfspaceIntersection& h);

// Exhaustive check of network(x', 1) == 1 - intersection(x') over the
// whole cube; returns the number of mismatches (0 = exact).
std::int64_t equivalence_mismatches(const HalfspaceIntersection& h, const ClippedIntNetwork& net);

// W_tilde = [W; I_n] with the lifted input map x -> (x, 0, ..., 0); keeps
// W_tilde^T x_tilde == W^T x and forces s_min(W_tilde) >= 1.
struct PaddedNetwork {
  Mat W_tilde;  // (d+n) x n
  int original_dim = 0;

  Vec lift(const Vec& x) const;
  double s_min() const;
};

PaddedNetwork pad_independent(const Mat& W);

// f_rounded = 1 - rnd(f) with rnd(z) = 0 for z <= 1/2; checks the
// pointwise inequality Pr(f_rounded != g) <= 8 E[((1-f) - g)^2].
struct RoundBound {
  double disagreement = 0.0;
  double mse = 0.0;
  bool inequality_holds = false;
};

RoundBound round_and_bound(std::span<const double> f, std::span<const double> g);

}  // namespace plateau
