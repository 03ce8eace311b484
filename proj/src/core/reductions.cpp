#include "core/reductions.hpp"

#include "core/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace plateau {

using nlohmann::json;

HalfspaceIntersection::HalfspaceIntersection(IntMat w, IntVec b)
    : weights(std::move(w)), thresholds(std::move(b)) {
  if (weights.rows() != thresholds.size() || weights.rows() < 1 || weights.cols() < 1) {
    throw invalid_argument("HalfspaceIntersection: shape mismatch");
  }
}

double HalfspaceIntersection::max_param_norm() const {
  double worst = 0.0;
  for (int i = 0; i < weights.rows(); ++i) {
    double s = static_cast<double>(thresholds[i]) * thresholds[i];
    for (int j = 0; j < weights.cols(); ++j) {
      s += static_cast<double>(weights(i, j)) * weights(i, j);
    }
    worst = std::max(worst, std::sqrt(s));
  }
  return worst;
}

int HalfspaceIntersection::eval(const IntVec& x) const {
  if (x.size() != weights.cols()) {
    throw invalid_argument("intersection_eval: dimension mismatch");
  }
  for (int j = 0; j < x.size(); ++j) {
    if (x[j] != 0 && x[j] != 1) {
      throw invalid_argument("intersection_eval: input must be Boolean");
    }
  }
  for (int i = 0; i < weights.rows(); ++i) {
    std::int64_t dot = 0;
    for (int j = 0; j < x.size(); ++j) dot += weights(i, j) * x[j];
    if (dot < thresholds[i]) return 0;
  }
  return 1;
}

HalfspaceIntersection HalfspaceIntersection::random(int input_dim, int n,
                                                    std::int64_t weight_bound,
                                                    std::uint64_t seed) {
  if (weight_bound < 1) throw invalid_argument("random intersection: weight bound must be >= 1");
  RandomStream rs(seed, 0x4a1f);
  IntMat w(n, input_dim);
  IntVec b(n);
  const std::uint64_t span = static_cast<std::uint64_t>(2 * weight_bound + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < input_dim; ++j) {
      w(i, j) = static_cast<std::int64_t>(rs.next_u64() % span) - weight_bound;
    }
    b[i] = static_cast<std::int64_t>(rs.next_u64() % span) - weight_bound;
  }
  return HalfspaceIntersection(std::move(w), std::move(b));
}

HalfspaceIntersection HalfspaceIntersection::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("intersection JSON parse error: ") + e.what());
  }
  const auto& jw = j.at("weights");
  const int n = static_cast<int>(jw.size());
  if (n < 1) throw invalid_argument("intersection JSON: empty weights");
  const int d1 = static_cast<int>(jw.at(0).size());
  IntMat w(n, d1);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(jw.at(i).size()) != d1) {
      throw invalid_argument("intersection JSON: ragged weights");
    }
    for (int k = 0; k < d1; ++k) w(i, k) = jw.at(i).at(k).get<std::int64_t>();
  }
  IntVec b(n);
  for (int i = 0; i < n; ++i) b[i] = j.at("thresholds").at(i).get<std::int64_t>();
  return HalfspaceIntersection(std::move(w), std::move(b));
}

std::string HalfspaceIntersection::to_json() const {
  json j;
  std::vector<std::vector<std::int64_t>> w(weights.rows());
  for (int i = 0; i < weights.rows(); ++i) {
    w[i].resize(weights.cols());
    for (int k = 0; k < weights.cols(); ++k) w[i][k] = weights(i, k);
  }
  j["weights"] = w;
  j["thresholds"] = std::vector<std::int64_t>(thresholds.data(), thresholds.data() + thresholds.size());
  return j.dump();
}

int ClippedIntNetwork::eval(const IntVec& x) const {
  if (x.size() != columns.rows()) {
    throw invalid_argument("ClippedIntNetwork: dimension mismatch");
  }
  std::int64_t total = 0;
  for (int i = 0; i < columns.cols(); ++i) {
    std::int64_t dot = 0;
    for (int j = 0; j < x.size(); ++j) dot += columns(j, i) * x[j];
    if (dot > 0) total += dot;
  }
  if (total <= 0) return 0;
  return 1;  // integer total >= 1 clips to 1
}

ClippedReluSum ClippedIntNetwork::to_double() const {
  return ClippedReluSum(columns.cast<double>());
}

ClippedIntNetwork to_clipped_network(const HalfspaceIntersection& h) {
  // Column i is (-w_i, b_i); on inputs (x', 1) the unit's preactivation is
  // the integer b_i - <w_i, x'>, positive exactly when constraint i fails.
  const int d1 = h.input_dim();
  const int n = h.n_halfspaces();
  ClippedIntNetwork net;
  net.columns.resize(d1 + 1, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d1; ++j) net.columns(j, i) = -h.weights(i, j);
    net.columns(d1, i) = h.thresholds[i];
  }
  return net;
}

std::int64_t equivalence_mismatches(const HalfspaceIntersection& h,
                                    const ClippedIntNetwork& net) {
  const int d1 = h.input_dim();
  if (d1 > 26) throw invalid_argument("equivalence_mismatches: cube too large");
  std::int64_t mismatches = 0;
  IntVec x(d1), lifted(d1 + 1);
  lifted[d1] = 1;
  for (std::uint64_t mask = 0; mask < (1ULL << d1); ++mask) {
    for (int j = 0; j < d1; ++j) {
      x[j] = (mask >> j) & 1ULL;
      lifted[j] = x[j];
    }
    if (net.eval(lifted) != 1 - h.eval(x)) ++mismatches;
  }
  return mismatches;
}

Vec PaddedNetwork::lift(const Vec& x) const {
  Vec out = Vec::Zero(W_tilde.rows());
  out.head(original_dim) = x;
  return out;
}

double PaddedNetwork::s_min() const {
  Eigen::JacobiSVD<Mat> svd(W_tilde);
  return svd.singularValues().minCoeff();
}

PaddedNetwork pad_independent(const Mat& W) {
  const int d = static_cast<int>(W.rows());
  const int n = static_cast<int>(W.cols());
  PaddedNetwork p;
  p.original_dim = d;
  p.W_tilde.resize(d + n, n);
  p.W_tilde.topRows(d) = W;
  p.W_tilde.bottomRows(n) = Mat::Identity(n, n);
  return p;
}

RoundBound round_and_bound(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size() || f.empty()) {
    throw invalid_argument("round_and_bound: need non-empty paired lists");
  }
  std::int64_t disagree = 0;
  double mse = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    if (g[i] != 0.0 && g[i] != 1.0) {
      throw invalid_argument("round_and_bound: g must be Boolean");
    }
    const int rnd = f[i] <= 0.5 ? 0 : 1;
    const int f_tilde = 1 - rnd;
    if (f_tilde != static_cast<int>(g[i])) ++disagree;
    const double e = (1.0 - f[i]) - g[i];
    mse += e * e;
  }
  RoundBound rb;
  rb.disagreement = static_cast<double>(disagree) / static_cast<double>(f.size());
  rb.mse = mse / static_cast<double>(f.size());
  rb.inequality_holds = rb.disagreement <= 8.0 * rb.mse + 1e-15;
  return rb;
}

}  // namespace plateau
