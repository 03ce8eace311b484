#include "core/invariance.hpp"

#include "core/format.hpp"
#include "core/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace plateau {

namespace {
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed) ^ mix64(a + 0x9e3779b97f4a7c15ULL) ^ mix64(b + 0x2545f4914f6cdd1dULL));
}
}  // namespace

Dataset Dataset::from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw invalid_argument("dataset CSV: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().size() < 2) {
    throw invalid_argument("dataset CSV: need rows x1,...,xd,y");
  }
  const int m = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows.front().size()) - 1;
  Dataset ds;
  ds.X.resize(d, m);
  ds.y.resize(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) ds.X(j, i) = rows[i][j];
    ds.y[i] = rows[i][d];
  }
  return ds;
}

std::string Dataset::to_csv() const {
  std::ostringstream os;
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < dim(); ++j) os << fmt(X(j, i)) << ',';
    os << fmt(y[i]) << '\n';
  }
  return os.str();
}

WhiteningTransform whiten(const Dataset& dataset) {
  const Mat& X = dataset.X;
  if (X.size() == 0 || X.norm() == 0.0) {
    throw invalid_argument("whiten: X must be non-zero");
  }
  Eigen::BDCSVD<Mat> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sing = svd.singularValues();
  const double cutoff = 1e-12 * sing[0];
  int rank = 0;
  while (rank < sing.size() && sing[rank] > cutoff) ++rank;

  WhiteningTransform w;
  w.rank = rank;
  w.U = svd.matrixU().leftCols(rank);
  w.D = sing.head(rank);
  w.V = svd.matrixV().leftCols(rank);
  w.P = w.D.cwiseInverse().asDiagonal() * w.U.transpose();

  const Mat gram = (w.P * X) * (w.P * X).transpose();
  if ((gram - Mat::Identity(rank, rank)).cwiseAbs().maxCoeff() > 1e-10) {
    throw numeric_failure("whiten: transformed Gram deviates from identity beyond 1e-10");
  }
  return w;
}

const std::vector<InnerAlgorithm>& algorithm_registry() {
  static const std::vector<InnerAlgorithm> reg = [] {
    std::vector<InnerAlgorithm> algs;

    // Reads off the first transformed instance; trivially equivariant.
    algs.push_back({"first_column", "linear", true,
                    [](const Dataset& ds, std::uint64_t) -> Mat { return ds.X.col(0); }});

    // Full-batch gradient descent on the squared loss of a linear
    // predictor, zero init, spectral step size. Iterates stay in the
    // span of the data, so the returned predictor is rotation-equivariant.
    algs.push_back({"gd_linear", "linear", true, [](const Dataset& ds, std::uint64_t) -> Mat {
                      const int m = ds.size();
                      const Mat gram = ds.X * ds.X.transpose() / m;
                      Eigen::SelfAdjointEigenSolver<Mat> es(gram);
                      const double lmax = es.eigenvalues().maxCoeff();
                      const double eta = lmax > 0.0 ? 0.45 / lmax : 0.0;
                      Vec w = Vec::Zero(ds.dim());
                      for (int it = 0; it < 50; ++it) {
                        const Vec resid = ds.X.transpose() * w - ds.y;
                        w -= eta * (2.0 / m) * (ds.X * resid);
                      }
                      return w;
                    }});

    // Ridge with a spectral regularizer; closed form, equivariant.
    algs.push_back({"ridge", "linear", true, [](const Dataset& ds, std::uint64_t) -> Mat {
                      const int m = ds.size();
                      const int d = ds.dim();
                      const Mat gram = ds.X * ds.X.transpose() / m;
                      Eigen::SelfAdjointEigenSolver<Mat> es(gram);
                      const double lam = 0.1 * std::max(es.eigenvalues().maxCoeff(), 1e-12);
                      const Mat A = gram + lam * Mat::Identity(d, d);
                      const Vec b = ds.X * ds.y / m;
                      return A.ldlt().solve(b);
                    }});

    // Control: coordinate-wise statistic, deliberately not invariant.
    algs.push_back(
        {"coordwise_abs_mean", "linear", false, [](const Dataset& ds, std::uint64_t) -> Mat {
           return ds.X.cwiseAbs().rowwise().mean();
         }});
    return algs;
  }();
  return reg;
}

const InnerAlgorithm& find_algorithm(const std::string& name) {
  for (const auto& a : algorithm_registry()) {
    if (a.name == name) return a;
  }
  throw invalid_argument("unknown algorithm '" + name + "'");
}

double apply_f(const std::string& tag, const Vec& z) {
  if (tag == "linear") {
    if (z.size() != 1) throw invalid_argument("apply_f: 'linear' expects one output");
    return z[0];
  }
  if (tag == "sum") return z.sum();
  if (tag == "clipped_relu_sum") {
    double s = 0.0;
    for (int i = 0; i < z.size(); ++i)
      if (z[i] > 0.0) s += z[i];
    return std::min(1.0, std::max(0.0, s));
  }
  throw invalid_argument("apply_f: unknown tag '" + tag + "'");
}

PipelinePredictor whitened_pipeline(const InnerAlgorithm& inner, const Dataset& dataset,
                                    std::uint64_t seed) {
  const WhiteningTransform wt = whiten(dataset);
  Dataset transformed;
  transformed.X = wt.P * dataset.X;
  transformed.y = dataset.y;
  const Mat W = inner.run(transformed, seed);
  PipelinePredictor pred;
  pred.f_tag = inner.f_tag;
  pred.W_eff = wt.P.transpose() * W;
  return pred;
}

namespace {

double paired_discrepancy(const std::string& f_tag, const Mat& W_orig, const Mat& W_trans,
                          const Mat& M, const Mat& points) {
  double worst = 0.0;
  for (int i = 0; i < points.cols(); ++i) {
    const Vec x = points.col(i);
    const double a = apply_f(f_tag, W_orig.transpose() * x);
    const double b = apply_f(f_tag, W_trans.transpose() * (M * x));
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace

InvarianceVerdict check_orthogonal_invariance(const InnerAlgorithm& algorithm,
                                              const Dataset& dataset, const Mat& holdout,
                                              int n_trials, std::uint64_t seed, double tol) {
  if (n_trials < 1) throw invalid_argument("check_orthogonal_invariance: n_trials >= 1");
  const int d = dataset.dim();
  InvarianceVerdict v;
  v.tolerance = tol;
  const Mat W = algorithm.run(dataset, seed);
  for (int trial = 0; trial < n_trials; ++trial) {
    RandomStream rs(derive_seed(seed, 0x0c7, trial), 0);
    const Mat M = random_orthogonal(d, rs);
    Dataset transformed;
    transformed.X = M * dataset.X;
    transformed.y = dataset.y;
    const Mat W_M = algorithm.run(transformed, seed);  // shared coin flips
    v.max_dataset_discrepancy = std::max(
        v.max_dataset_discrepancy, paired_discrepancy(algorithm.f_tag, W, W_M, M, dataset.X));
    v.max_holdout_discrepancy = std::max(
        v.max_holdout_discrepancy, paired_discrepancy(algorithm.f_tag, W, W_M, M, holdout));
  }
  v.pass = v.max_dataset_discrepancy <= tol;
  return v;
}

InvarianceVerdict check_linear_invariance(const InnerAlgorithm& inner, const Dataset& dataset,
                                          const Mat& holdout, int n_trials, double cond_max,
                                          std::uint64_t seed, double tol) {
  if (n_trials < 1) throw invalid_argument("check_linear_invariance: n_trials >= 1");
  const int d = dataset.dim();
  InvarianceVerdict v;
  v.tolerance = tol;
  const PipelinePredictor base = whitened_pipeline(inner, dataset, seed);
  for (int trial = 0; trial < n_trials; ++trial) {
    RandomStream rs(derive_seed(seed, 0x11e, trial), 0);
    const Mat M = random_invertible(d, cond_max, rs);
    Dataset transformed;
    transformed.X = M * dataset.X;
    transformed.y = dataset.y;
    const PipelinePredictor moved = whitened_pipeline(inner, transformed, seed);
    v.max_dataset_discrepancy =
        std::max(v.max_dataset_discrepancy,
                 paired_discrepancy(base.f_tag, base.W_eff, moved.W_eff, M, dataset.X));
    v.max_holdout_discrepancy =
        std::max(v.max_holdout_discrepancy,
                 paired_discrepancy(base.f_tag, base.W_eff, moved.W_eff, M, holdout));
  }
  v.pass = v.max_dataset_discrepancy <= tol;
  return v;
}

Transport transport_construct(const Mat& W_star, const Mat& W) {
  if (W_star.rows() != W.rows() || W_star.cols() != W.cols()) {
    throw invalid_argument("transport_construct: shape mismatch");
  }
  const int d = static_cast<int>(W.rows());
  const int n = static_cast<int>(W.cols());
  if (n > d) throw invalid_argument("transport_construct: need n <= d");

  auto complement = [&](const Mat& A) -> Mat {
    Eigen::HouseholderQR<Mat> qr(A);
    const Mat Q = qr.householderQ();
    return Q.rightCols(d - n);
  };
  auto check_rank = [&](const Mat& A, const char* which) {
    Eigen::JacobiSVD<Mat> svd(A);
    const Vec& s = svd.singularValues();
    if (s[s.size() - 1] <= 1e-12 * s[0]) {
      throw invalid_argument(std::string("transport_construct: ") + which +
                             " is rank deficient");
    }
  };
  check_rank(W_star, "W_star");
  check_rank(W, "W");

  Mat A(d, d), B(d, d);
  if (n == d) {
    A = W;
    B = W_star;
  } else {
    A << W, complement(W);
    B << W_star, complement(W_star);
  }

  Transport t;
  const Mat Mt = A * B.inverse();  // M^T
  t.M = Mt.transpose();

  Eigen::JacobiSVD<Mat> svd_m(t.M);
  t.M_norm = svd_m.singularValues()[0];
  Eigen::JacobiSVD<Mat> svd_a(A), svd_b(B);
  t.certificate = svd_a.singularValues()[0] / svd_b.singularValues()[d - 1];
  t.residual = (W - Mt * W_star).norm() / W.norm();
  if (t.residual > 1e-10) {
    throw numeric_failure("transport_construct: residual above 1e-10");
  }
  return t;
}

int DataSource::dim() const {
  return kind == Kind::Mixture ? mixture->dim() : static_cast<int>(directions.cols());
}

Mat DataSource::sample(int n, std::uint64_t seed) const {
  if (kind == Kind::Mixture) return mixture->sample(n, seed);
  const int k = static_cast<int>(directions.rows());
  std::vector<double> cum(k);
  double acc = 0.0;
  for (int i = 0; i < k; ++i) {
    acc += weights.empty() ? 1.0 / k : weights[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;
  Mat out(n, dim());
  for (int i = 0; i < n; ++i) {
    RandomStream rs(seed, static_cast<std::uint64_t>(i));
    out.row(i) = directions.row(rs.pick_cumulative(cum));
  }
  return out;
}

DataSource DataSource::from_mixture(GaussianMixture m) {
  DataSource s;
  s.kind = Kind::Mixture;
  s.mixture = std::make_shared<GaussianMixture>(std::move(m));
  return s;
}

DataSource DataSource::from_directions(Mat dirs, std::vector<double> w) {
  if (!w.empty() && static_cast<int>(w.size()) != dirs.rows()) {
    throw invalid_argument("DataSource: weights/directions mismatch");
  }
  DataSource s;
  s.kind = Kind::FixedDirections;
  s.directions = std::move(dirs);
  s.weights = std::move(w);
  return s;
}

Dataset make_dataset(const DataSource& source, int m, std::uint64_t seed) {
  if (m < 1) throw invalid_argument("make_dataset: m must be >= 1");
  Dataset ds;
  ds.X = source.sample(m, seed).transpose();
  RandomStream rs(derive_seed(seed, 0x7ea), 0);
  const Vec teacher = sphere_point(source.dim(), 1.0, rs);
  ds.y = ds.X.transpose() * teacher;
  return ds;
}

SpanCoverage span_coverage(const DataSource& source, int d, int m, int n_datasets,
                           int n_holdout, std::uint64_t seed) {
  if (m < 1) throw invalid_argument("span_coverage: m must be >= 1");
  if (source.dim() != d) throw invalid_argument("span_coverage: dimension mismatch");

  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < n_datasets; ++t) {
    const Mat X = source.sample(m, derive_seed(seed, 0xda7a, t)).transpose();  // d x m
    const Mat H = source.sample(n_holdout, derive_seed(seed, 0x401d, t));      // n x d
    const auto qr = X.colPivHouseholderQr();
    int out = 0;
    for (int i = 0; i < n_holdout; ++i) {
      const Vec x = H.row(i).transpose();
      const Vec c = qr.solve(x);
      const double resid = (x - X * c).norm();
      if (resid > 1e-8 * std::max(1.0, x.norm())) ++out;
    }
    const double p = static_cast<double>(out) / n_holdout;
    sum += p;
    sum2 += p * p;
  }
  SpanCoverage sc;
  sc.mean_probability = sum / n_datasets;
  const double var = std::max(0.0, sum2 / n_datasets - sc.mean_probability * sc.mean_probability);
  sc.std_error = std::sqrt(var / n_datasets);
  sc.bound = static_cast<double>(d) / (m + 1);
  return sc;
}

Mat random_orthogonal(int d, RandomStream& rs) {
  Mat G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = rs.normal();
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    if (R(i, i) < 0.0) Q.col(i) = -Q.col(i);
  }
  return Q;
}

Mat random_invertible(int d, double cond_max, RandomStream& rs) {
  if (!(cond_max >= 1.0)) throw invalid_argument("random_invertible: cond_max must be >= 1");
  const Mat U = random_orthogonal(d, rs);
  const Mat V = random_orthogonal(d, rs);
  const double hi = std::sqrt(cond_max);
  const double lo = 1.0 / hi;
  Vec s(d);
  for (int i = 0; i < d; ++i) {
    const double u = rs.uniform01();
    s[i] = lo * std::pow(hi / lo, u);  // log-uniform in [lo, hi]
  }
  return U * s.asDiagonal() * V.transpose();
}

}  // namespace plateau
