#pragma once

#include "core/common.hpp"
#include "core/objective.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace plateau {

// eps = cbrt( sup_w G_w * (exp(-d) + sum_{n>=1} eps(n r)) ) with both
// unspecified universal constants set to 1 (declared convention) and
// r = ||w_star|| / 2. Cosine family only (sup G_w = 4 pi^2 E ||x||^2).
double epsilon_recipe(const GaussianMixture& mixture, const PredictorFamily& family,
                      double wstar_norm);

struct OracleConfig {
  double epsilon = 0.0;  // > 0
  enum class MeanSource { SphereMC, SphereQuadrature };
  MeanSource source = MeanSource::SphereMC;
  int mean_draws = 10000;           // sphere draws for the MC mean
  std::uint64_t mean_seed = 0x0e11; // dedicated stream, independent of runs
  std::int64_t mean_mc_x = 100000;  // per-draw x samples when no closed form
};

// E over target directions (uniform on the sphere of the problem's
// ||w_star||) of grad F at a probe point, cached per probe.
class SphereMeanGradient {
 public:
  SphereMeanGradient(const Problem& prototype, OracleConfig config);

  struct Result {
    Vec mean;
    double approx_error = 0.0;  // standard-error estimate of the MC mean
  };
  const Result& at(const Vec& w);

  // 1-D quadrature over the angle between w and w_star; isotropic
  // zero-mean single-component cosine problems only (cross-check path).
  Vec quadrature_mean(const Vec& w) const;

 private:
  Problem prototype_;
  OracleConfig config_;
  Mat directions_;  // mean_draws x d, norm ||w_star|| rows
  std::map<std::vector<double>, Result> cache_;
  std::mutex mutex_;
};

struct OracleResponse {
  Vec gradient;
  bool mean_branch = false;
  double distance = 0.0;      // || true - mean ||
  double mean_error = 0.0;    // approximation error of the mean itself
};

// Returns the sphere-mean gradient when the true gradient is within
// epsilon of it (Euclidean norm), the true gradient otherwise.
OracleResponse oracle_query(const Problem& problem, SphereMeanGradient& mean_source,
                            double epsilon, const Vec& w);

struct StepSchedule {
  enum class Kind { Constant, InvSqrt };
  Kind kind = Kind::Constant;
  double eta = 0.01;
  double at(std::int64_t t) const {  // t is 1-based
    if (!(eta > 0.0)) throw invalid_argument("StepSchedule: eta must be > 0");
    return kind == Kind::Constant ? eta : eta / std::sqrt(static_cast<double>(t));
  }
};

struct InitRule {
  enum class Kind { Zero, Fixed, RandomUnit, NearTarget };
  Kind kind = Kind::RandomUnit;
  Vec fixed;
  double scale = 1.0;    // RandomUnit: ||w1|| = scale
  double offset = 0.01;  // NearTarget: w1 = w_star + offset * random unit

  Vec init(const Problem& problem, std::uint64_t seed) const;
};

struct Trainer {
  enum class Kind { GD, NormalizedGD, SGD };
  Kind kind = Kind::GD;
  StepSchedule schedule;
  InitRule init;
  std::int64_t steps = 1000;
  std::optional<double> projection_radius;  // project onto ||w|| <= radius
  std::int64_t sgd_batch = 1024;
  std::int64_t record_every = 1;
};

// What drives the updates: the eps-oracle, honest population gradients
// (closed form when available, MC otherwise), or minibatch SGD.
struct GradientSource {
  enum class Kind { Oracle, Honest, Minibatch };
  Kind kind = Kind::Honest;
  std::shared_ptr<SphereMeanGradient> mean;  // Oracle
  double epsilon = 0.0;                      // Oracle
  std::int64_t honest_mc_x = 1000000;        // Honest without closed form
};

struct StepRecord {
  std::int64_t t = 0;  // 1-based
  Vec w;
  // 0 honest/minibatch, 1 oracle mean branch, 2 oracle true branch
  int branch = 0;
  double objective = 0.0;
};

struct TrajectoryRecord {
  std::vector<StepRecord> steps;  // iterates w_1..w_T at record_every spacing
  Vec final_w;                    // w_{T+1}
  double final_objective = 0.0;
  std::int64_t true_branch_count = 0;
  std::int64_t mean_branch_count = 0;
  bool oracle_valid = true;  // mean approximation error stayed << epsilon

  bool identical_to(const TrajectoryRecord& other) const;
  // First recorded step index whose iterate differs (bytewise); -1 if none.
  std::int64_t first_divergence(const TrajectoryRecord& other) const;
};

TrajectoryRecord run_trainer(const Problem& problem, const Trainer& trainer,
                             const GradientSource& source, std::uint64_t run_seed);

struct IndependenceReport {
  int n_targets = 0;
  int identical_pairs = 0;
  int total_pairs = 0;
  std::int64_t earliest_divergence = -1;  // -1 when all pairs identical
  std::int64_t true_branch_total = 0;
  bool oracle_valid = true;
  double fraction_identical() const {
    return total_pairs == 0 ? 1.0 : static_cast<double>(identical_pairs) / total_pairs;
  }
};

// Runs the same seeded trainer against n_targets random target directions
// (norm taken from the prototype's ||w_star||) and compares trajectories.
IndependenceReport trajectory_independence_check(const Problem& prototype, int n_targets,
                                                 const Trainer& trainer,
                                                 const GradientSource& source,
                                                 std::uint64_t seed,
                                                 std::vector<TrajectoryRecord>* out = nullptr);

}  // namespace plateau
