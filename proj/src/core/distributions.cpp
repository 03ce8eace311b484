#include "core/distributions.hpp"

#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/specfun.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>
#include <utility>

namespace plateau {

using nlohmann::json;

GaussianComponent GaussianComponent::make(Vec mean, Mat cov, double weight, CovForm form) {
  const int d = static_cast<int>(mean.size());
  if (d < 1) throw invalid_argument("GaussianComponent: empty mean");
  if (cov.rows() != d || cov.cols() != d) {
    throw invalid_argument("GaussianComponent: covariance shape mismatch");
  }
  if (!(weight > 0.0)) throw invalid_argument("GaussianComponent: weight must be > 0");
  if (!cov.isApprox(cov.transpose(), 1e-12)) {
    throw invalid_argument("GaussianComponent: covariance not symmetric");
  }

  GaussianComponent c;
  c.mean = std::move(mean);
  c.cov = 0.5 * (cov + cov.transpose());
  c.weight = weight;
  c.form = form;

  Eigen::SelfAdjointEigenSolver<Mat> es(c.cov);
  c.cov_eigvals = es.eigenvalues();
  if (c.cov_eigvals.minCoeff() <= 0.0) {
    throw invalid_argument("GaussianComponent: covariance not positive definite");
  }

  Eigen::LLT<Mat> llt(c.cov);
  if (llt.info() != Eigen::Success) {
    throw invalid_argument("GaussianComponent: Cholesky factorization failed");
  }
  c.chol = llt.matrixL();

  double log_det = 0.0;
  for (int i = 0; i < d; ++i) log_det += std::log(c.cov_eigvals[i]);
  c.log_norm = -0.5 * d * std::log(2.0 * kPi) - 0.5 * log_det;
  return c;
}

double GaussianComponent::density(const Vec& x) const {
  const Vec diff = x - mean;
  const Vec solved = chol.triangularView<Eigen::Lower>().solve(diff);
  return std::exp(log_norm - 0.5 * solved.squaredNorm());
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components, int dim)
    : components_(std::move(components)), dim_(dim) {
  if (components_.empty()) throw invalid_argument("GaussianMixture: no components");
  if (dim_ < 1) throw invalid_argument("GaussianMixture: dim must be >= 1");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.dim() != dim_) throw invalid_argument("GaussianMixture: component dimension mismatch");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw invalid_argument("GaussianMixture: weights must sum to 1 within 1e-12");
  }
  cum_weights_.reserve(components_.size());
  double acc = 0.0;
  for (const auto& c : components_) {
    acc += c.weight;
    cum_weights_.push_back(acc);
  }
  cum_weights_.back() = 1.0;
}

GaussianMixture GaussianMixture::standard(int dim) {
  return GaussianMixture(
      {GaussianComponent::make(Vec::Zero(dim), Mat::Identity(dim, dim), 1.0,
                               GaussianComponent::CovForm::Iso)},
      dim);
}

GaussianMixture GaussianMixture::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_argument(std::string("mixture JSON parse error: ") + e.what());
  }
  if (!j.contains("dim") || !j.contains("components")) {
    throw invalid_argument("mixture JSON: expected {\"dim\", \"components\"}");
  }
  const int d = j.at("dim").get<int>();
  std::vector<GaussianComponent> comps;
  for (const auto& jc : j.at("components")) {
    const double w = jc.at("weight").get<double>();
    Vec mean = Vec::Zero(d);
    if (jc.contains("mean")) {
      const auto& jm = jc.at("mean");
      if (static_cast<int>(jm.size()) != d) {
        throw invalid_argument("mixture JSON: mean length != dim");
      }
      for (int i = 0; i < d; ++i) mean[i] = jm.at(i).get<double>();
    }
    Mat cov;
    auto form = GaussianComponent::CovForm::Full;
    const auto& jcov = jc.at("cov");
    if (jcov.contains("iso")) {
      const double s = jcov.at("iso").get<double>();
      cov = s * Mat::Identity(d, d);
      form = GaussianComponent::CovForm::Iso;
    } else if (jcov.contains("diag")) {
      const auto& jd = jcov.at("diag");
      if (static_cast<int>(jd.size()) != d) {
        throw invalid_argument("mixture JSON: diag length != dim");
      }
      cov = Mat::Zero(d, d);
      for (int i = 0; i < d; ++i) cov(i, i) = jd.at(i).get<double>();
      form = GaussianComponent::CovForm::Diag;
    } else if (jcov.contains("full")) {
      const auto& jf = jcov.at("full");
      if (static_cast<int>(jf.size()) != d) {
        throw invalid_argument("mixture JSON: full covariance shape mismatch");
      }
      cov = Mat::Zero(d, d);
      for (int i = 0; i < d; ++i) {
        if (static_cast<int>(jf.at(i).size()) != d) {
          throw invalid_argument("mixture JSON: full covariance shape mismatch");
        }
        for (int k = 0; k < d; ++k) cov(i, k) = jf.at(i).at(k).get<double>();
      }
    } else {
      throw invalid_argument("mixture JSON: cov must be one of iso/diag/full");
    }
    comps.push_back(GaussianComponent::make(std::move(mean), std::move(cov), w, form));
  }
  return GaussianMixture(std::move(comps), d);
}

std::string GaussianMixture::to_json() const {
  json j;
  j["dim"] = dim_;
  json arr = json::array();
  for (const auto& c : components_) {
    json jc;
    jc["weight"] = c.weight;
    jc["mean"] = std::vector<double>(c.mean.data(), c.mean.data() + c.dim());
    switch (c.form) {
      case GaussianComponent::CovForm::Iso:
        jc["cov"] = {{"iso", c.cov(0, 0)}};
        break;
      case GaussianComponent::CovForm::Diag: {
        std::vector<double> diag(c.dim());
        for (int i = 0; i < c.dim(); ++i) diag[i] = c.cov(i, i);
        jc["cov"] = {{"diag", diag}};
        break;
      }
      case GaussianComponent::CovForm::Full: {
        std::vector<std::vector<double>> full(c.dim(), std::vector<double>(c.dim()));
        for (int i = 0; i < c.dim(); ++i)
          for (int k = 0; k < c.dim(); ++k) full[i][k] = c.cov(i, k);
        jc["cov"] = {{"full", full}};
        break;
      }
    }
    arr.push_back(std::move(jc));
  }
  j["components"] = std::move(arr);
  return j.dump();
}

void GaussianMixture::draw(RandomStream& rs, Vec& out) const {
  const int c = (components_.size() == 1) ? 0 : rs.pick_cumulative(cum_weights_);
  thread_local Vec z;
  z.resize(dim_);
  rs.fill_normal(z.data(), dim_);
  out = components_[c].mean;
  out.noalias() += components_[c].chol * z;
}

void GaussianMixture::sample_into(double* out, std::int64_t n, std::uint64_t seed) const {
  if (n < 1) throw invalid_argument("sample: n must be >= 1");
  const int d = dim_;
  chunked_run(
      n, kDefaultChunk,
      [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
        Vec x(d);
        for (std::int64_t i = lo; i < hi; ++i) {
          RandomStream rs(seed, static_cast<std::uint64_t>(i));
          draw(rs, x);
          Eigen::Map<Vec>(out + i * d, d) = x;
        }
      },
      nullptr);
}

Mat GaussianMixture::sample(std::int64_t n, std::uint64_t seed) const {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat out(n, dim_);
  sample_into(out.data(), n, seed);
  return out;
}

double GaussianMixture::density(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim_) {
    throw invalid_argument("density: dimension mismatch");
  }
  double acc = 0.0;
  for (const auto& c : components_) acc += c.weight * c.density(x);
  return acc;
}

ConcentrationProfile GaussianMixture::epsilon_profile(int component) const {
  if (component < 0 || component >= static_cast<int>(components_.size())) {
    throw invalid_argument("epsilon_profile: component index out of range");
  }
  // For density phi^2 = N(mu, Sigma), |phihat(xi)|^2 has Gaussian shape
  // with precision 16 pi^2 Sigma (the mean only contributes a phase), so
  // the mass outside radius r is a weighted chi-square tail in the
  // eigenvalues of Sigma.
  const Vec& lam = components_[component].cov_eigvals;
  std::vector<double> v(lam.size());
  for (int i = 0; i < lam.size(); ++i) v[i] = 1.0 / (16.0 * kPi * kPi * lam[i]);
  ConcentrationProfile p;
  p.tag = "gaussian";
  p.eval = [v](double r) { return std::sqrt(weighted_chisq_tail(v, r * r)); };
  return p;
}

ConcentrationProfile GaussianMixture::epsilon_profile() const {
  std::vector<ConcentrationProfile> all;
  all.reserve(components_.size());
  for (int i = 0; i < static_cast<int>(components_.size()); ++i) {
    all.push_back(epsilon_profile(i));
  }
  ConcentrationProfile p;
  p.tag = "gaussian-mixture-worst";
  p.eval = [all](double r) {
    double m = 0.0;
    for (const auto& q : all) m = std::max(m, q.eval(r));
    return m;
  };
  return p;
}

Vec GaussianMixture::mean() const {
  Vec m = Vec::Zero(dim_);
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

Mat GaussianMixture::covariance() const {
  const Vec m = mean();
  Mat cov = Mat::Zero(dim_, dim_);
  for (const auto& c : components_) {
    cov += c.weight * (c.cov + c.mean * c.mean.transpose());
  }
  cov -= m * m.transpose();
  return cov;
}

double GaussianMixture::second_moment() const {
  double s = 0.0;
  for (const auto& c : components_) {
    s += c.weight * (c.cov.trace() + c.mean.squaredNorm());
  }
  return s;
}

double GaussianMixture::projected_cdf(const Vec& u, double t) const {
  if (static_cast<int>(u.size()) != dim_) {
    throw invalid_argument("projected_cdf: dimension mismatch");
  }
  double acc = 0.0;
  for (const auto& c : components_) {
    const double mu = u.dot(c.mean);
    const double sd = std::sqrt(u.dot(c.cov * u));
    acc += c.weight * (1.0 - normal_upper_tail((t - mu) / sd));
  }
  return acc;
}

TailSum bound_tail_sum(const ConcentrationProfile& profile, double r, int n_max) {
  if (!(r > 0.0)) throw invalid_argument("bound_tail_sum: r must be > 0");
  if (n_max < 1) throw invalid_argument("bound_tail_sum: n_max must be >= 1");

  TailSum out;
  double last = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    last = profile(static_cast<double>(n) * r);
    out.partial += last;
  }
  if (last <= 0.0) {
    out.remainder_bound = 0.0;
    return out;
  }
  const double next = profile(static_cast<double>(n_max + 1) * r);
  const double q = next / last;
  if (q >= 1.0) {
    out.remainder_bound = std::numeric_limits<double>::infinity();
  } else {
    out.remainder_bound = last * q / (1.0 - q);
  }
  return out;
}

}  // namespace plateau
