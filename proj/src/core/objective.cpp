#include "core/objective.hpp"

#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/summation.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace plateau {

Problem::Problem(GaussianMixture mix, PeriodicFn target, Vec wstar, PredictorFamily fam)
    : mixture(std::move(mix)), psi(std::move(target)), w_star(std::move(wstar)),
      family(std::move(fam)) {
  if (static_cast<int>(w_star.size()) != mixture.dim()) {
    throw invalid_argument("Problem: w_star dimension mismatch");
  }
  if (family.input_dim() != mixture.dim()) {
    throw invalid_argument("Problem: family input dimension mismatch");
  }
}

bool Problem::has_closed_form() const {
  if (family.kind() != PredictorFamily::Kind::Cosine) return false;
  if (psi.kind() != PeriodicFn::Kind::Cosine) return false;
  for (const auto& c : mixture.components()) {
    if (c.mean.squaredNorm() > 0.0) return false;
  }
  return true;
}

Estimate objective_mc(const Problem& problem, const Vec& w, std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw invalid_argument("objective_mc: n must be >= 2");
  if (static_cast<int>(w.size()) != problem.family.param_dim()) {
    throw invalid_argument("objective_mc: parameter dimension mismatch");
  }
  const int d = problem.dim();

  const std::int64_t nchunks = chunk_count(n, kDefaultChunk);
  std::vector<KahanSum> s1(nchunks), s2(nchunks);
  chunked_run(
      n, kDefaultChunk,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t c) {
        Vec x(d);
        for (std::int64_t i = lo; i < hi; ++i) {
          RandomStream rs(seed, static_cast<std::uint64_t>(i));
          problem.mixture.draw(rs, x);
          const double r = problem.family.predict(w, x) - problem.target(x);
          const double v = r * r;
          s1[c].add(v);
          s2[c].add(v * v);
        }
      },
      nullptr);

  KahanSum t1, t2;
  for (std::int64_t c = 0; c < nchunks; ++c) {
    t1.merge(s1[c]);
    t2.merge(s2[c]);
  }
  Estimate e;
  e.n = n;
  e.seed = seed;
  e.value = t1.value() / static_cast<double>(n);
  const double m2 = t2.value() / static_cast<double>(n);
  e.std_error = std::sqrt(std::max(0.0, m2 - e.value * e.value) / static_cast<double>(n));
  return e;
}

VecEstimate grad_mc(const Problem& problem, const Vec& w, std::int64_t n, std::uint64_t seed) {
  if (n < 2) throw invalid_argument("grad_mc: n must be >= 2");
  if (static_cast<int>(w.size()) != problem.family.param_dim()) {
    throw invalid_argument("grad_mc: parameter dimension mismatch");
  }
  const int d = problem.dim();
  const int p = problem.family.param_dim();

  struct Partial {
    Vec sum;
    Vec sum2;
  };
  const std::int64_t nchunks = chunk_count(n, kDefaultChunk);
  std::vector<Partial> parts(nchunks);
  chunked_run(
      n, kDefaultChunk,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t c) {
        parts[c].sum = Vec::Zero(p);
        parts[c].sum2 = Vec::Zero(p);
        Vec x(d), g(p);
        for (std::int64_t i = lo; i < hi; ++i) {
          RandomStream rs(seed, static_cast<std::uint64_t>(i));
          problem.mixture.draw(rs, x);
          const double r = problem.family.predict(w, x) - problem.target(x);
          problem.family.grad_params(w, x, g);
          g *= 2.0 * r;
          parts[c].sum += g;
          parts[c].sum2 += g.cwiseProduct(g);
        }
      },
      nullptr);

  Vec sum = Vec::Zero(p), sum2 = Vec::Zero(p);
  for (std::int64_t c = 0; c < nchunks; ++c) {
    sum += parts[c].sum;
    sum2 += parts[c].sum2;
  }
  VecEstimate e;
  e.n = n;
  e.seed = seed;
  e.value = sum / static_cast<double>(n);
  e.std_error.resize(p);
  for (int i = 0; i < p; ++i) {
    const double m2 = sum2[i] / static_cast<double>(n);
    e.std_error[i] =
        std::sqrt(std::max(0.0, m2 - e.value[i] * e.value[i]) / static_cast<double>(n));
  }
  return e;
}

namespace {
double quad_form(const Mat& cov, const Vec& a) { return a.dot(cov * a); }
}  // namespace

double objective_cos_gauss_closed(const Vec& w, const Vec& w_star, const Mat& cov) {
  const Vec diff = w - w_star;
  const Vec sum = w + w_star;
  return 1.0 + 0.5 * std::exp(-8.0 * kPi * kPi * quad_form(cov, w)) +
         0.5 * std::exp(-8.0 * kPi * kPi * quad_form(cov, w_star)) -
         std::exp(-kTwoPiSq * quad_form(cov, diff)) -
         std::exp(-kTwoPiSq * quad_form(cov, sum));
}

Vec grad_cos_gauss_closed(const Vec& w, const Vec& w_star, const Mat& cov) {
  const Vec diff = w - w_star;
  const Vec sum = w + w_star;
  Vec g = (-8.0 * kPi * kPi * std::exp(-8.0 * kPi * kPi * quad_form(cov, w))) * (cov * w);
  g += (kFourPiSq * std::exp(-kTwoPiSq * quad_form(cov, diff))) * (cov * diff);
  g += (kFourPiSq * std::exp(-kTwoPiSq * quad_form(cov, sum))) * (cov * sum);
  return g;
}

double objective_closed(const Problem& problem, const Vec& w) {
  if (!problem.has_closed_form()) {
    throw unsupported("objective_closed: no closed form for this problem");
  }
  double acc = 0.0;
  for (const auto& c : problem.mixture.components()) {
    acc += c.weight * objective_cos_gauss_closed(w, problem.w_star, c.cov);
  }
  return acc;
}

Vec grad_closed(const Problem& problem, const Vec& w) {
  if (!problem.has_closed_form()) {
    throw unsupported("grad_closed: no closed form for this problem");
  }
  Vec g = Vec::Zero(problem.dim());
  for (const auto& c : problem.mixture.components()) {
    g += c.weight * grad_cos_gauss_closed(w, problem.w_star, c.cov);
  }
  return g;
}

Mat landscape_grid(const Problem& problem, const GridSpec& spec,
                   std::optional<std::int64_t> mc_samples, std::uint64_t seed) {
  if (problem.dim() != 2) throw invalid_argument("landscape_grid: problem must be 2-D");
  if (spec.n < 2) throw invalid_argument("landscape_grid: grid needs >= 2 points per axis");
  const bool closed = problem.has_closed_form() && !mc_samples;

  Mat out(spec.n, spec.n);
  const std::int64_t cells = static_cast<std::int64_t>(spec.n) * spec.n;
  chunked_run(
      cells, 256,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
        Vec w(2);
        for (std::int64_t cell = lo; cell < hi; ++cell) {
          const int i = static_cast<int>(cell / spec.n);
          const int j = static_cast<int>(cell % spec.n);
          w[0] = spec.coord(i);
          w[1] = spec.coord(j);
          out(i, j) = closed ? objective_closed(problem, w)
                             : objective_mc(problem, w, mc_samples.value_or(100000), seed).value;
        }
      },
      nullptr);
  return out;
}

}  // namespace plateau
