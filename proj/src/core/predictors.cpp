#include "core/predictors.hpp"

#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/summation.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace plateau {

using nlohmann::json;

PredictorFamily PredictorFamily::cosine(int dim) {
  if (dim < 1) throw invalid_argument("cosine family: dim must be >= 1");
  return PredictorFamily(Kind::Cosine, dim, 0);
}

PredictorFamily PredictorFamily::clipped_relu_sum(int dim, int units) {
  if (dim < 1 || units < 1) throw invalid_argument("clipped_relu_sum: bad shape");
  return PredictorFamily(Kind::ClippedReluSum, dim, units);
}

PredictorFamily PredictorFamily::one_hidden_relu(int dim, int hidden) {
  if (dim < 1 || hidden < 1) throw invalid_argument("one_hidden_relu: bad shape");
  return PredictorFamily(Kind::OneHiddenRelu, dim, hidden);
}

PredictorFamily PredictorFamily::from_json(const std::string& text, int dim) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("family JSON parse error: ") + e.what());
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "cosine") return cosine(dim);
  if (kind == "clipped_relu_sum") return clipped_relu_sum(dim, j.at("units").get<int>());
  if (kind == "one_hidden_relu") return one_hidden_relu(dim, j.at("hidden").get<int>());
  throw invalid_argument("family JSON: unknown kind '" + kind + "'");
}

std::string PredictorFamily::to_json() const {
  json j;
  switch (kind_) {
    case Kind::Cosine:
      j["kind"] = "cosine";
      break;
    case Kind::ClippedReluSum:
      j["kind"] = "clipped_relu_sum";
      j["units"] = units_;
      break;
    case Kind::OneHiddenRelu:
      j["kind"] = "one_hidden_relu";
      j["hidden"] = units_;
      break;
  }
  return j.dump();
}

int PredictorFamily::param_dim() const {
  switch (kind_) {
    case Kind::Cosine:
      return dim_;
    case Kind::ClippedReluSum:
      return dim_ * units_;
    case Kind::OneHiddenRelu:
      return dim_ * units_ + 2 * units_ + 1;
  }
  return 0;
}

void PredictorFamily::check_dims(const Vec& params, const Vec& x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw invalid_argument("predict: input dimension mismatch");
  }
  if (static_cast<int>(params.size()) != param_dim()) {
    throw invalid_argument("predict: parameter dimension mismatch");
  }
}

double PredictorFamily::predict(const Vec& params, const Vec& x) const {
  check_dims(params, x);
  switch (kind_) {
    case Kind::Cosine:
      return std::cos(2.0 * kPi * params.dot(x));
    case Kind::ClippedReluSum: {
      double s = 0.0;
      for (int i = 0; i < units_; ++i) {
        const double z = params.segment(static_cast<Eigen::Index>(i) * dim_, dim_).dot(x);
        if (z > 0.0) s += z;
      }
      return std::min(1.0, std::max(0.0, s));
    }
    case Kind::OneHiddenRelu: {
      const int k = units_;
      double out = params[dim_ * k + 2 * k];  // c
      for (int jj = 0; jj < k; ++jj) {
        const double z = params.segment(static_cast<Eigen::Index>(jj) * dim_, dim_).dot(x) +
                         params[dim_ * k + jj];
        if (z > 0.0) out += params[dim_ * k + k + jj] * z;
      }
      return out;
    }
  }
  return 0.0;
}

void PredictorFamily::grad_params(const Vec& params, const Vec& x, Vec& out) const {
  check_dims(params, x);
  out.setZero(param_dim());
  switch (kind_) {
    case Kind::Cosine: {
      const double s = std::sin(2.0 * kPi * params.dot(x));
      out = (-2.0 * kPi * s) * x;
      return;
    }
    case Kind::ClippedReluSum: {
      double s = 0.0;
      for (int i = 0; i < units_; ++i) {
        const double z = params.segment(static_cast<Eigen::Index>(i) * dim_, dim_).dot(x);
        if (z > 0.0) s += z;
      }
      if (s <= 0.0 || s >= 1.0) return;  // clipped region or kink: zero
      for (int i = 0; i < units_; ++i) {
        const double z = params.segment(static_cast<Eigen::Index>(i) * dim_, dim_).dot(x);
        if (z > 0.0) out.segment(static_cast<Eigen::Index>(i) * dim_, dim_) = x;
      }
      return;
    }
    case Kind::OneHiddenRelu: {
      const int k = units_;
      for (int jj = 0; jj < k; ++jj) {
        const double z = params.segment(static_cast<Eigen::Index>(jj) * dim_, dim_).dot(x) +
                         params[dim_ * k + jj];
        if (z > 0.0) {
          const double vj = params[dim_ * k + k + jj];
          out.segment(static_cast<Eigen::Index>(jj) * dim_, dim_) = vj * x;
          out[dim_ * k + jj] = vj;           // d/db_j
          out[dim_ * k + k + jj] = z;        // d/dv_j
        }
      }
      out[dim_ * k + 2 * k] = 1.0;  // d/dc
      return;
    }
  }
}

ClippedReluSum::ClippedReluSum(Mat weights) : W(std::move(weights)) {
  if (W.rows() < 1 || W.cols() < 1) throw invalid_argument("ClippedReluSum: empty W");
  if (!W.allFinite()) throw invalid_argument("ClippedReluSum: non-finite weights");
}

double ClippedReluSum::eval(const Vec& x) const {
  if (x.size() != W.rows()) throw invalid_argument("ClippedReluSum: dimension mismatch");
  double s = 0.0;
  for (int i = 0; i < W.cols(); ++i) {
    const double z = W.col(i).dot(x);
    if (z > 0.0) s += z;
  }
  return std::min(1.0, std::max(0.0, s));
}

Vec ClippedReluSum::params() const {
  Vec p(W.size());
  Eigen::Map<Mat>(p.data(), W.rows(), W.cols()) = W;
  return p;
}

OneHiddenReluNet::OneHiddenReluNet(Mat W_, Vec b_, Vec v_, double c_)
    : W(std::move(W_)), b(std::move(b_)), v(std::move(v_)), c(c_) {
  if (W.cols() != b.size() || W.cols() != v.size()) {
    throw invalid_argument("OneHiddenReluNet: shape mismatch");
  }
  if (!W.allFinite() || !b.allFinite() || !v.allFinite() || !std::isfinite(c)) {
    throw invalid_argument("OneHiddenReluNet: non-finite parameters");
  }
}

double OneHiddenReluNet::eval(const Vec& x) const {
  if (x.size() != W.rows()) throw invalid_argument("OneHiddenReluNet: dimension mismatch");
  double out = c;
  for (int jj = 0; jj < W.cols(); ++jj) {
    const double z = W.col(jj).dot(x) + b[jj];
    if (z > 0.0) out += v[jj] * z;
  }
  return out;
}

Vec OneHiddenReluNet::params() const {
  const int d = dim(), k = hidden();
  Vec p(d * k + 2 * k + 1);
  Eigen::Map<Mat>(p.data(), d, k) = W;
  p.segment(d * k, k) = b;
  p.segment(d * k + k, k) = v;
  p[d * k + 2 * k] = c;
  return p;
}

OneHiddenReluNet OneHiddenReluNet::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("network JSON parse error: ") + e.what());
  }
  const int d = j.at("dim").get<int>();
  const int k = j.at("hidden").get<int>();
  const auto& jW = j.at("W");  // row-major d x k
  if (static_cast<int>(jW.size()) != d) throw invalid_argument("network JSON: W shape");
  Mat W(d, k);
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(jW.at(r).size()) != k) throw invalid_argument("network JSON: W shape");
    for (int cc = 0; cc < k; ++cc) W(r, cc) = jW.at(r).at(cc).get<double>();
  }
  Vec b(k), v(k);
  for (int jj = 0; jj < k; ++jj) b[jj] = j.at("b").at(jj).get<double>();
  for (int jj = 0; jj < k; ++jj) v[jj] = j.at("v").at(jj).get<double>();
  return OneHiddenReluNet(std::move(W), std::move(b), std::move(v), j.at("c").get<double>());
}

std::string OneHiddenReluNet::to_json() const {
  json j;
  j["dim"] = dim();
  j["hidden"] = hidden();
  std::vector<std::vector<double>> rows(dim(), std::vector<double>(hidden()));
  for (int r = 0; r < dim(); ++r)
    for (int cc = 0; cc < hidden(); ++cc) rows[r][cc] = W(r, cc);
  j["W"] = rows;
  j["b"] = std::vector<double>(b.data(), b.data() + b.size());
  j["v"] = std::vector<double>(v.data(), v.data() + v.size());
  j["c"] = c;
  return j.dump();
}

GradNormBound estimate_grad_norm_bound(const PredictorFamily& family, const Vec& w,
                                       const GaussianMixture& mixture, std::int64_t n,
                                       std::uint64_t seed) {
  if (n < 100) throw invalid_argument("estimate_grad_norm_bound: n must be >= 100");
  const int d = mixture.dim();

  const std::int64_t nchunks = chunk_count(n, kDefaultChunk);
  std::vector<KahanSum> sums(nchunks), sums2(nchunks);
  chunked_run(
      n, kDefaultChunk,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t c) {
        Vec x(d), g(family.param_dim());
        for (std::int64_t i = lo; i < hi; ++i) {
          RandomStream rs(seed, static_cast<std::uint64_t>(i));
          mixture.draw(rs, x);
          family.grad_params(w, x, g);
          const double v = g.squaredNorm();
          sums[c].add(v);
          sums2[c].add(v * v);
        }
      },
      nullptr);

  KahanSum total, total2;
  for (std::int64_t c = 0; c < nchunks; ++c) {
    total.merge(sums[c]);
    total2.merge(sums2[c]);
  }
  const double mean = total.value() / static_cast<double>(n);
  const double mean2 = total2.value() / static_cast<double>(n);
  GradNormBound out;
  out.value = mean;
  out.std_error = std::sqrt(std::max(0.0, mean2 - mean * mean) / static_cast<double>(n));
  out.n = n;
  if (family.kind() == PredictorFamily::Kind::Cosine) {
    out.analytic_bound = kFourPiSq * mixture.second_moment();
  }
  return out;
}

double cosine_grad_norm_exact(const Vec& w, const GaussianMixture& mixture) {
  double acc = 0.0;
  for (const auto& comp : mixture.components()) {
    if (comp.mean.squaredNorm() > 0.0) {
      throw unsupported("cosine_grad_norm_exact: zero-mean components only");
    }
    const double tr = comp.cov.trace();
    const Vec sw = comp.cov * w;
    const double quad = w.dot(sw);
    acc += comp.weight *
           (kTwoPiSq * (tr - (tr - 16.0 * kPi * kPi * sw.squaredNorm()) *
                                 std::exp(-8.0 * kPi * kPi * quad)));
  }
  return acc;
}

}  // namespace plateau
