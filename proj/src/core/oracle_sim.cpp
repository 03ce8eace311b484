#include "core/oracle_sim.hpp"

#include "core/rng.hpp"
#include "core/specfun.hpp"

#include <cmath>
#include <cstring>

namespace plateau {

namespace {
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed) ^ mix64(a + 0x9e3779b97f4a7c15ULL) ^ mix64(b + 0x2545f4914f6cdd1dULL));
}
}  // namespace

double epsilon_recipe(const GaussianMixture& mixture, const PredictorFamily& family,
                      double wstar_norm) {
  if (family.kind() != PredictorFamily::Kind::Cosine) {
    throw unsupported("epsilon_recipe: analytic sup G_w known for the cosine family only");
  }
  if (!(wstar_norm > 0.0)) throw invalid_argument("epsilon_recipe: wstar_norm must be > 0");
  const double sup_g = kFourPiSq * mixture.second_moment();
  const double r = 0.5 * wstar_norm;
  const double series = bound_tail_sum(mixture.epsilon_profile(), r, 50).value();
  const double bound = sup_g * (std::exp(-static_cast<double>(mixture.dim())) + series);
  return std::cbrt(bound);
}

SphereMeanGradient::SphereMeanGradient(const Problem& prototype, OracleConfig config)
    : prototype_(prototype), config_(config) {
  const double radius = prototype_.w_star.norm();
  if (!(radius > 0.0)) {
    throw invalid_argument("SphereMeanGradient: prototype needs ||w_star|| > 0");
  }
  directions_ = sphere_points(prototype_.dim(), radius, config_.mean_draws, config_.mean_seed);
}

const SphereMeanGradient::Result& SphereMeanGradient::at(const Vec& w) {
  std::vector<double> key(w.data(), w.data() + w.size());
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }

  const int p = prototype_.family.param_dim();
  const int n = config_.mean_draws;
  Vec sum = Vec::Zero(p), sum2 = Vec::Zero(p);
  Problem probe = prototype_;
  const bool closed = prototype_.has_closed_form();
  for (int k = 0; k < n; ++k) {
    probe.w_star = directions_.row(k).transpose();
    const Vec g = closed
                      ? grad_closed(probe, w)
                      : grad_mc(probe, w, config_.mean_mc_x, derive_seed(config_.mean_seed, 0x6d))
                            .value;
    sum += g;
    sum2 += g.cwiseProduct(g);
  }
  Result res;
  res.mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (int i = 0; i < p; ++i) {
    const double m2 = sum2[i] / static_cast<double>(n);
    var += std::max(0.0, m2 - res.mean[i] * res.mean[i]);
  }
  res.approx_error = std::sqrt(var / static_cast<double>(n));

  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.emplace(std::move(key), std::move(res)).first->second;
}

Vec SphereMeanGradient::quadrature_mean(const Vec& w) const {
  if (!prototype_.has_closed_form() || prototype_.mixture.components().size() != 1) {
    throw unsupported("quadrature_mean: single zero-mean isotropic Gaussian cosine case only");
  }
  const Mat& cov = prototype_.mixture.components()[0].cov;
  const int d = prototype_.dim();
  const double s2 = cov(0, 0);
  if (!cov.isApprox(s2 * Mat::Identity(d, d), 1e-12)) {
    throw unsupported("quadrature_mean: isotropic covariance required");
  }
  const double radius = prototype_.w_star.norm();
  const double wn = w.norm();
  const double c1 = 8.0 * kPi * kPi * s2;

  if (d == 1) {
    // The two possible targets +-radius yield the same gradient.
    Vec wstar(1);
    wstar[0] = radius;
    return grad_cos_gauss_closed(w, wstar, cov);
  }

  // E grad F = -8 pi^2 s^2 w e^{-8 pi^2 s^2 ||w||^2}
  //            + 8 pi^2 s^2 E[(w - w*) e^{-2 pi^2 s^2 ||w - w*||^2}],
  // and the expectation lies along w by symmetry. With theta the angle
  // between w and w*, the sphere measure is sin^{d-2}(theta) d theta.
  Vec out = (-c1 * std::exp(-c1 * wn * wn)) * w;
  if (wn == 0.0) return out;  // the averaged term vanishes by symmetry

  const auto& q = gauss_legendre(256);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    const double theta = 0.5 * kPi * (q.nodes[i] + 1.0);  // [0, pi]
    const double jac = 0.5 * kPi;
    const double weight = std::pow(std::sin(theta), d - 2) * jac * q.weights[i];
    const double cth = std::cos(theta);
    const double dist2 = wn * wn + radius * radius - 2.0 * radius * wn * cth;
    num += weight * (wn - radius * cth) * std::exp(-kTwoPiSq * s2 * dist2);
    den += weight;
  }
  out += (c1 * num / den / wn) * w;
  return out;
}

OracleResponse oracle_query(const Problem& problem, SphereMeanGradient& mean_source,
                            double epsilon, const Vec& w) {
  if (!(epsilon > 0.0)) throw invalid_argument("oracle_query: epsilon must be > 0");
  const auto& mean = mean_source.at(w);
  const Vec true_grad = problem.has_closed_form()
                            ? grad_closed(problem, w)
                            : grad_mc(problem, w, 1000000, derive_seed(0x7157, 0)).value;
  OracleResponse resp;
  resp.distance = (true_grad - mean.mean).norm();
  resp.mean_error = mean.approx_error;
  if (resp.distance <= epsilon) {
    resp.gradient = mean.mean;
    resp.mean_branch = true;
  } else {
    resp.gradient = true_grad;
    resp.mean_branch = false;
  }
  return resp;
}

Vec InitRule::init(const Problem& problem, std::uint64_t seed) const {
  const int p = problem.family.param_dim();
  switch (kind) {
    case Kind::Zero:
      return Vec::Zero(p);
    case Kind::Fixed:
      if (static_cast<int>(fixed.size()) != p) {
        throw invalid_argument("InitRule: fixed init has wrong dimension");
      }
      return fixed;
    case Kind::RandomUnit: {
      RandomStream rs(seed, 0x111ULL);
      return scale * sphere_point(p, 1.0, rs);
    }
    case Kind::NearTarget: {
      if (static_cast<int>(problem.w_star.size()) != p) {
        throw invalid_argument("InitRule: NearTarget needs param_dim == dim");
      }
      RandomStream rs(seed, 0x112ULL);
      return problem.w_star + offset * sphere_point(p, 1.0, rs);
    }
  }
  return Vec::Zero(p);
}

bool TrajectoryRecord::identical_to(const TrajectoryRecord& other) const {
  return first_divergence(other) < 0;
}

std::int64_t TrajectoryRecord::first_divergence(const TrajectoryRecord& other) const {
  const size_t n = std::min(steps.size(), other.steps.size());
  for (size_t i = 0; i < n; ++i) {
    const Vec& a = steps[i].w;
    const Vec& b = other.steps[i].w;
    if (a.size() != b.size() ||
        std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) != 0) {
      return steps[i].t;
    }
  }
  if (steps.size() != other.steps.size()) {
    return static_cast<std::int64_t>(n) + 1;
  }
  if (final_w.size() != other.final_w.size() ||
      std::memcmp(final_w.data(), other.final_w.data(), sizeof(double) * final_w.size()) != 0) {
    return steps.empty() ? 1 : steps.back().t + 1;
  }
  return -1;
}

TrajectoryRecord run_trainer(const Problem& problem, const Trainer& trainer,
                             const GradientSource& source, std::uint64_t run_seed) {
  if (trainer.steps < 0) throw invalid_argument("run_trainer: steps must be >= 0");
  const bool closed = problem.has_closed_form();
  auto objective_at = [&](const Vec& w) {
    return closed ? objective_closed(problem, w)
                  : objective_mc(problem, w, 10000, derive_seed(run_seed, 0xf)).value;
  };

  TrajectoryRecord rec;
  Vec w = trainer.init.init(problem, run_seed);
  const int d = problem.dim();
  Vec g(problem.family.param_dim());

  for (std::int64_t t = 1; t <= trainer.steps; ++t) {
    int branch = 0;
    switch (source.kind) {
      case GradientSource::Kind::Oracle: {
        auto resp = oracle_query(problem, *source.mean, source.epsilon, w);
        g = resp.gradient;
        branch = resp.mean_branch ? 1 : 2;
        if (resp.mean_branch) {
          ++rec.mean_branch_count;
        } else {
          ++rec.true_branch_count;
        }
        if (!(resp.mean_error <= source.epsilon / 10.0)) rec.oracle_valid = false;
        break;
      }
      case GradientSource::Kind::Honest:
        g = closed ? grad_closed(problem, w)
                   : grad_mc(problem, w, source.honest_mc_x, derive_seed(run_seed, 0xb, t)).value;
        break;
      case GradientSource::Kind::Minibatch: {
        g = grad_mc(problem, w, trainer.sgd_batch, derive_seed(run_seed, 0x5d, t)).value;
        break;
      }
    }

    if (trainer.record_every > 0 && (t - 1) % trainer.record_every == 0) {
      rec.steps.push_back({t, w, branch, objective_at(w)});
    }

    double step = trainer.schedule.at(t);
    if (trainer.kind == Trainer::Kind::NormalizedGD) {
      const double gn = g.norm();
      if (gn > 0.0) step /= gn;
    }
    w -= step * g;
    if (trainer.projection_radius) {
      const double wn = w.norm();
      if (wn > *trainer.projection_radius) w *= *trainer.projection_radius / wn;
    }
    if (!w.allFinite()) {
      throw numeric_failure("run_trainer: iterate diverged (non-finite) at iteration " +
                                std::to_string(t),
                            t);
    }
  }

  (void)d;
  rec.final_w = w;
  rec.final_objective = objective_at(w);
  return rec;
}

IndependenceReport trajectory_independence_check(const Problem& prototype, int n_targets,
                                                 const Trainer& trainer,
                                                 const GradientSource& source, std::uint64_t seed,
                                                 std::vector<TrajectoryRecord>* out) {
  if (n_targets < 2) throw invalid_argument("trajectory_independence_check: need >= 2 targets");
  const double radius = prototype.w_star.norm();
  const Mat targets =
      sphere_points(prototype.dim(), radius, n_targets, derive_seed(seed, 0x7a));

  std::vector<TrajectoryRecord> runs;
  runs.reserve(n_targets);
  for (int k = 0; k < n_targets; ++k) {
    Problem p = prototype;
    p.w_star = targets.row(k).transpose();
    runs.push_back(run_trainer(p, trainer, source, seed));
  }

  IndependenceReport rep;
  rep.n_targets = n_targets;
  for (const auto& r : runs) {
    rep.true_branch_total += r.true_branch_count;
    rep.oracle_valid = rep.oracle_valid && r.oracle_valid;
  }
  for (int i = 0; i < n_targets; ++i) {
    for (int j = i + 1; j < n_targets; ++j) {
      ++rep.total_pairs;
      const std::int64_t div = runs[i].first_divergence(runs[j]);
      if (div < 0) {
        ++rep.identical_pairs;
      } else if (rep.earliest_divergence < 0 || div < rep.earliest_divergence) {
        rep.earliest_divergence = div;
      }
    }
  }
  if (out) *out = std::move(runs);
  return rep;
}

}  // namespace plateau
