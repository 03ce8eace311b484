#include "core/invariance.hpp"
#include "core/rng.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace plateau;

TEST_SUITE_BEGIN("invariance");

TEST_CASE("whiten: identity data and diagonal data") {
  Dataset ds;
  ds.X = Mat::Identity(3, 3);
  ds.y = Vec::Zero(3);
  const auto wt = whiten(ds);
  CHECK(wt.rank == 3);
  CHECK((wt.P - Mat::Identity(3, 3)).norm() < 1e-12);
  CHECK(((wt.P * ds.X) - Mat::Identity(3, 3)).norm() < 1e-12);

  Dataset diag;
  diag.X = Mat::Zero(2, 2);
  diag.X(0, 0) = 2.0;
  diag.X(1, 1) = 3.0;
  diag.y = Vec::Zero(2);
  const auto wd = whiten(diag);
  const Mat px = wd.P * diag.X;
  for (int j = 0; j < 2; ++j) {
    CHECK(px.col(j).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
  // P is diag(1/2, 1/3) up to row ordering/sign of the SVD
  const Mat absP = wd.P.cwiseAbs();
  CHECK(absP.maxCoeff() == doctest::Approx(0.5));
}

TEST_CASE("whiten: random and rank-deficient Gram identities") {
  RandomStream rs(3, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rs.next_u64() % 6);
    const int m = d + static_cast<int>(rs.next_u64() % 40);
    Dataset ds;
    ds.X.resize(d, m);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < m; ++j) ds.X(i, j) = rs.normal();
    if (trial % 3 == 0 && d >= 3) ds.X.row(d - 1) = ds.X.row(0) + ds.X.row(1);  // deficient
    if (trial % 7 == 0) ds.X.row(0).setZero();
    ds.y = Vec::Zero(m);
    const auto wt = whiten(ds);
    const Mat gram = (wt.P * ds.X) * (wt.P * ds.X).transpose();
    CHECK((gram - Mat::Identity(wt.rank, wt.rank)).cwiseAbs().maxCoeff() <= 1e-10);
  }
  Dataset zero;
  zero.X = Mat::Zero(3, 5);
  zero.y = Vec::Zero(5);
  CHECK_THROWS_AS(whiten(zero), invalid_argument);
}

TEST_CASE("random 5x100 whitening Gram is the 5x5 identity") {
  RandomStream rs(5, 0);
  Dataset ds;
  ds.X.resize(5, 100);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 100; ++j) ds.X(i, j) = rs.normal();
  ds.y = Vec::Zero(100);
  const auto wt = whiten(ds);
  CHECK(wt.rank == 5);
  const Mat gram = (wt.P * ds.X) * (wt.P * ds.X).transpose();
  CHECK((gram - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-10);
}

namespace {

Dataset gaussian_dataset(int d, int m, std::uint64_t seed) {
  return make_dataset(DataSource::from_mixture(GaussianMixture::standard(d)), m, seed);
}

double pipeline_transform_discrepancy(const InnerAlgorithm& inner, const Dataset& ds,
                                      const Mat& M, std::uint64_t seed) {
  const PipelinePredictor base = whitened_pipeline(inner, ds, seed);
  Dataset moved;
  moved.X = M * ds.X;
  moved.y = ds.y;
  const PipelinePredictor shifted = whitened_pipeline(inner, moved, seed);
  double worst = 0.0;
  for (int i = 0; i < ds.size(); ++i) {
    const double a = base.predict(ds.X.col(i));
    const double b = shifted.predict(M * ds.X.col(i));
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

}  // namespace

TEST_CASE("whitened pipeline: identity transform changes nothing") {
  const Dataset ds = gaussian_dataset(5, 40, 11);
  const auto& alg = find_algorithm("first_column");
  CHECK(pipeline_transform_discrepancy(alg, ds, Mat::Identity(5, 5), 1) <= 1e-12);
}

TEST_CASE("whitened pipeline survives bounded invertible transforms") {
  const Dataset ds = gaussian_dataset(6, 80, 13);
  RandomStream rs(17, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat M = random_invertible(6, 100.0, rs);  // ||M||, ||M^-1|| <= 10
    CHECK(pipeline_transform_discrepancy(find_algorithm("first_column"), ds, M, 1) <= 1e-8);
    CHECK(pipeline_transform_discrepancy(find_algorithm("gd_linear"), ds, M, 1) <= 1e-6);
    CHECK(pipeline_transform_discrepancy(find_algorithm("ridge"), ds, M, 1) <= 1e-6);
  }
}

TEST_CASE("orthogonal invariance: gradient-style algorithms pass, the control fails") {
  const int d = 6;
  const DataSource source = DataSource::from_mixture(GaussianMixture::standard(d));
  const Dataset ds = make_dataset(source, 60, 19);
  const Mat holdout = source.sample(30, 23).transpose();

  for (const char* name : {"first_column", "gd_linear", "ridge"}) {
    const auto v = check_orthogonal_invariance(find_algorithm(name), ds, holdout, 5, 7, 1e-8);
    CHECK(v.pass);
    CHECK(v.max_dataset_discrepancy <= 1e-8);
    // full-rank continuous data: the holdout lies in the span, so the
    // invariance extends off the dataset as well
    CHECK(v.max_holdout_discrepancy <= 1e-6);
  }

  const auto control =
      check_orthogonal_invariance(find_algorithm("coordwise_abs_mean"), ds, holdout, 5, 7, 1e-8);
  CHECK(!control.pass);
  CHECK(control.max_dataset_discrepancy >= 0.1);
}

TEST_CASE("identity transform in the orthogonal harness gives zero discrepancy") {
  const Dataset ds = gaussian_dataset(4, 20, 29);
  const auto& alg = find_algorithm("gd_linear");
  const Mat W = alg.run(ds, 1);
  double worst = 0.0;
  for (int i = 0; i < ds.size(); ++i) {
    worst = std::max(worst, std::abs(apply_f(alg.f_tag, W.transpose() * ds.X.col(i)) -
                                     apply_f(alg.f_tag, W.transpose() * ds.X.col(i))));
  }
  CHECK(worst == 0.0);
}

TEST_CASE("transport: reflexive, scaled and random pairs") {
  RandomStream rs(31, 0);
  // W = W_star: residual tiny and a valid certificate
  Mat Ws(5, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 2; ++j) Ws(i, j) = rs.normal();
  const auto self = transport_construct(Ws, Ws);
  CHECK(self.residual <= 1e-10);
  CHECK(self.M_norm >= 1.0 - 1e-9);

  // W = 2 W_star on an orthonormal W_star: the construction scales by 2
  Mat ortho = random_orthogonal(5, rs).leftCols(2);
  const auto doubled = transport_construct(ortho, Mat(2.0 * ortho));
  CHECK(doubled.residual <= 1e-10);
  CHECK(doubled.M_norm == doctest::Approx(2.0).epsilon(1e-9));

  // random full-rank pairs: residual and certificate hold
  for (int trial = 0; trial < 10; ++trial) {
    Mat A(6, 2), B(6, 2);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 2; ++j) {
        A(i, j) = rs.normal();
        B(i, j) = rs.normal();
      }
    const auto t = transport_construct(A, B);
    CHECK(t.residual <= 1e-10);
    CHECK(t.M_norm <= t.certificate * (1.0 + 1e-9));
  }

  // rank-deficient input rejected
  Mat bad(5, 2);
  bad.setZero();
  bad.col(0).setOnes();
  bad.col(1) = 2.0 * bad.col(0);
  CHECK_THROWS_AS(transport_construct(bad, Ws), invalid_argument);
}

TEST_CASE("transport carries the target predictions across the correspondence") {
  // h(W^T x) on x equals h(W_star^T y) on y = M^{-T} ... realized as:
  // W = M^T W_star means W^T x = W_star^T (M x).
  RandomStream rs(37, 0);
  Mat Ws(6, 3), W(6, 3);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 3; ++j) {
      Ws(i, j) = rs.normal();
      W(i, j) = rs.normal();
    }
  const auto t = transport_construct(Ws, W);
  for (int k = 0; k < 50; ++k) {
    Vec x(6);
    for (int i = 0; i < 6; ++i) x[i] = rs.normal();
    const Vec a = W.transpose() * x;
    const Vec b = Ws.transpose() * (t.M * x);
    CHECK((a - b).norm() <= 1e-8 * std::max(1.0, b.norm()));
  }
}

TEST_CASE("span coverage: continuous data with m >= d is always in span") {
  const DataSource source = DataSource::from_mixture(GaussianMixture::standard(4));
  const auto sc = span_coverage(source, 4, 6, 50, 40, 3);
  CHECK(sc.mean_probability == 0.0);
  CHECK(sc.bound == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("span coverage: three fixed directions match the enumeration oracle") {
  // dataset of m=2 draws over k=3 equal-mass directions; a fresh draw
  // falls outside the span iff its direction is absent from the dataset:
  // P = (1/3) * (2/3) + (2/3) * (1/3) = 4/9 by pattern enumeration.
  RandomStream rs(41, 0);
  Mat dirs(3, 10);
  for (int i = 0; i < 3; ++i) dirs.row(i) = sphere_point(10, 1.0, rs).transpose();
  const DataSource degen = DataSource::from_directions(dirs);
  const auto sc = span_coverage(degen, 10, 2, 400, 200, 5);
  CHECK(sc.mean_probability >= 1.0 / 3.0);
  CHECK(std::abs(sc.mean_probability - 4.0 / 9.0) < 0.05);
  CHECK(sc.mean_probability <= sc.bound + 3.0 * sc.std_error);
}

TEST_CASE("span coverage bound holds across degenerate configurations") {
  RandomStream rs(43, 0);
  for (int k : {2, 4}) {
    Mat dirs(k, 8);
    for (int i = 0; i < k; ++i) dirs.row(i) = sphere_point(8, 1.0, rs).transpose();
    const DataSource degen = DataSource::from_directions(dirs);
    for (int m : {2, 5, 20}) {
      const auto sc = span_coverage(degen, 8, m, 200, 100, 7);
      CHECK(sc.mean_probability <= sc.bound + 3.0 * sc.std_error);
      // analytic oracle for equal masses: (1 - 1/k)^m
      const double expect = std::pow(1.0 - 1.0 / k, m);
      CHECK(std::abs(sc.mean_probability - expect) < 0.06);
    }
  }
}

TEST_CASE("dataset CSV round-trip") {
  const Dataset ds = gaussian_dataset(3, 12, 47);
  const Dataset round = Dataset::from_csv(ds.to_csv());
  CHECK(round.dim() == 3);
  CHECK(round.size() == 12);
  CHECK((round.X - ds.X).norm() == 0.0);
  CHECK((round.y - ds.y).norm() == 0.0);
  CHECK_THROWS_AS(Dataset::from_csv(""), invalid_argument);
}

TEST_CASE("random orthogonal matrices are Haar-like and orthogonal") {
  RandomStream rs(53, 0);
  for (int t = 0; t < 5; ++t) {
    const Mat Q = random_orthogonal(5, rs);
    CHECK((Q * Q.transpose() - Mat::Identity(5, 5)).norm() < 1e-12);
  }
  const Mat M = random_invertible(6, 1000.0, rs);
  Eigen::JacobiSVD<Mat> svd(M);
  const double cond = svd.singularValues()[0] / svd.singularValues()[5];
  CHECK(cond <= 1000.0 * (1.0 + 1e-9));
}

TEST_SUITE_END();
