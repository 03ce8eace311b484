#pragma once

#include "core/common.hpp"
#include "core/distributions.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace plateau {

class RandomStream;

// Instances as columns of X, one label per column.
struct Dataset {
  Mat X;  // d x m
  Vec y;  // m

  int dim() const { return static_cast<int>(X.rows()); }
  int size() const { return static_cast<int>(X.cols()); }

  static Dataset from_csv(const std::string& text);  // rows x1,...,xd,y
  std::string to_csv() const;
};

// P = D^{-1} U^T from a thin SVD X = U D V^T, with singular values below
// 1e-12 * sigma_max truncated. P X has orthonormal rows, so the Gram of
// the transformed instances is the identity.
struct WhiteningTransform {
  Mat P;  // rank x d
  Mat U;  // d x rank
  Vec D;  // rank
  Mat V;  // m x rank
  int rank = 0;
};

WhiteningTransform whiten(const Dataset& dataset);

// Definition-style contract for an inner learner: dataset in, predictor
// x -> f(W^T x) out, with f drawn from a fixed registry by tag.
struct InnerAlgorithm {
  std::string name;
  std::string f_tag;
  bool orthogonally_invariant = false;  // what the registry claims; tests verify
  std::function<Mat(const Dataset&, std::uint64_t seed)> run;
};

const std::vector<InnerAlgorithm>& algorithm_registry();
const InnerAlgorithm& find_algorithm(const std::string& name);
double apply_f(const std::string& tag, const Vec& z);

struct PipelinePredictor {
  std::string f_tag;
  Mat W_eff;  // d x k, already P^T W

  double predict(const Vec& x) const { return apply_f(f_tag, W_eff.transpose() * x); }
};

// Whiten, run the inner algorithm on the transformed data, and pull the
// returned matrix back through P^T.
PipelinePredictor whitened_pipeline(const InnerAlgorithm& inner, const Dataset& dataset,
                                    std::uint64_t seed);

struct InvarianceVerdict {
  double max_dataset_discrepancy = 0.0;
  double max_holdout_discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Draws Haar-random orthogonal transforms and compares predictions of the
// algorithm run on original vs transformed data, over the dataset and a
// fresh holdout.
InvarianceVerdict check_orthogonal_invariance(const InnerAlgorithm& algorithm,
                                              const Dataset& dataset, const Mat& holdout,
                                              int n_trials, std::uint64_t seed, double tol);

// Same paired comparison for the whitened pipeline under invertible
// transforms with bounded condition number.
InvarianceVerdict check_linear_invariance(const InnerAlgorithm& inner, const Dataset& dataset,
                                          const Mat& holdout, int n_trials, double cond_max,
                                          std::uint64_t seed, double tol);

// Invertible M with W = M^T W_star plus the norm certificate
// ||[W What]|| * ||[W_star What_star]^{-1}|| from the augmented-basis
// construction.
struct Transport {
  Mat M;
  double M_norm = 0.0;
  double certificate = 0.0;
  double residual = 0.0;  // ||W - M^T W_star||_F / ||W||_F
};

Transport transport_construct(const Mat& W_star, const Mat& W);

// Where datasets come from: a smooth mixture or a distribution supported
// on finitely many fixed directions (for the span/coverage experiments).
struct DataSource {
  enum class Kind { Mixture, FixedDirections };
  Kind kind = Kind::Mixture;
  std::shared_ptr<GaussianMixture> mixture;
  Mat directions;               // k x d rows
  std::vector<double> weights;  // empty = uniform

  int dim() const;
  Mat sample(int n, std::uint64_t seed) const;  // n x d rows
  static DataSource from_mixture(GaussianMixture m);
  static DataSource from_directions(Mat dirs, std::vector<double> w = {});
};

// Labels from a seeded random linear teacher.
Dataset make_dataset(const DataSource& source, int m, std::uint64_t seed);

struct SpanCoverage {
  double mean_probability = 0.0;  // E over dataset draws of Pr(x not in span)
  double std_error = 0.0;
  double bound = 0.0;  // d / (m + 1)
};

SpanCoverage span_coverage(const DataSource& source, int d, int m, int n_datasets,
                           int n_holdout, std::uint64_t seed);

// Haar orthogonal (QR with sign-fixed R diagonal) and invertible matrices
// with a prescribed condition number bound.
Mat random_orthogonal(int d, RandomStream& rs);
Mat random_invertible(int d, double cond_max, RandomStream& rs);

}  // namespace plateau
