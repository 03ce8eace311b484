#include "core/reductions.hpp"
#include "core/rng.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace plateau;

TEST_SUITE_BEGIN("reductions");

namespace {

IntVec boolean_vec(std::uint64_t mask, int bits) {
  IntVec x(bits);
  for (int j = 0; j < bits; ++j) x[j] = (mask >> j) & 1ULL;
  return x;
}

}  // namespace

TEST_CASE("intersection: trivial constraints and direct checks") {
  // 0 >= 0 holds everywhere
  IntMat w0(1, 3);
  w0.setZero();
  IntVec b0(1);
  b0.setZero();
  const HalfspaceIntersection all_true(w0, b0);
  for (std::uint64_t m = 0; m < 8; ++m) {
    CHECK(all_true.eval(boolean_vec(m, 3)) == 1);
  }

  IntMat w1(1, 2);
  w1 << 1, 1;
  IntVec b1(1);
  b1 << 2;
  const HalfspaceIntersection pair(w1, b1);
  CHECK(pair.eval(boolean_vec(0b11, 2)) == 1);
  CHECK(pair.eval(boolean_vec(0b01, 2)) == 0);

  IntVec bad(2);
  bad << 2, 0;
  CHECK_THROWS_AS(pair.eval(bad), invalid_argument);
}

TEST_CASE("intersection: random instances agree with per-constraint brute force") {
  for (int trial = 0; trial < 5; ++trial) {
    const auto h = HalfspaceIntersection::random(10, 3, 5, 100 + trial);
    for (std::uint64_t m = 0; m < 1024; ++m) {
      const IntVec x = boolean_vec(m, 10);
      int expect = 1;
      for (int i = 0; i < 3; ++i) {
        std::int64_t dot = 0;
        for (int j = 0; j < 10; ++j) dot += h.weights(i, j) * x[j];
        if (dot < h.thresholds[i]) expect = 0;
      }
      CHECK(h.eval(x) == expect);
    }
  }
}

TEST_CASE("network conversion: single halfspace x1 >= 1 on two bits") {
  IntMat w(1, 2);
  w << 1, 0;
  IntVec b(1);
  b << 1;
  const HalfspaceIntersection h(w, b);
  const auto net = to_clipped_network(h);
  // network value is 1 - intersection: 0 exactly on {(1,0),(1,1)}
  for (std::uint64_t m = 0; m < 4; ++m) {
    IntVec lifted(3);
    lifted << (m & 1ULL), ((m >> 1) & 1ULL), 1;
    const int expect = (m & 1ULL) ? 0 : 1;
    CHECK(net.eval(lifted) == expect);
  }
  CHECK(equivalence_mismatches(h, net) == 0);
}

TEST_CASE("network conversion: exact over the full cube on random instances") {
  for (int trial = 0; trial < 20; ++trial) {
    const auto h = HalfspaceIntersection::random(8, 4, 5, 500 + trial);
    const auto net = to_clipped_network(h);
    CHECK(equivalence_mismatches(h, net) == 0);
  }
  // tautological intersection -> network identically 0
  IntMat w(2, 4);
  w.setZero();
  IntVec b(2);
  b.setZero();
  const auto net = to_clipped_network(HalfspaceIntersection(w, b));
  for (std::uint64_t m = 0; m < 16; ++m) {
    IntVec lifted(5);
    for (int j = 0; j < 4; ++j) lifted[j] = (m >> j) & 1ULL;
    lifted[4] = 1;
    CHECK(net.eval(lifted) == 0);
  }
}

TEST_CASE("integer network agrees with the double-precision clipped family") {
  const auto h = HalfspaceIntersection::random(6, 3, 4, 900);
  const auto net = to_clipped_network(h);
  const auto dbl = net.to_double();
  for (std::uint64_t m = 0; m < 64; ++m) {
    IntVec lifted(7);
    Vec x(7);
    for (int j = 0; j < 6; ++j) {
      lifted[j] = (m >> j) & 1ULL;
      x[j] = static_cast<double>(lifted[j]);
    }
    lifted[6] = 1;
    x[6] = 1.0;
    CHECK(static_cast<double>(net.eval(lifted)) == dbl.eval(x));
  }
}

TEST_CASE("padding: zero matrix, spectra and preserved outputs") {
  const Mat zero = Mat::Zero(4, 2);
  const auto p0 = pad_independent(zero);
  CHECK(p0.s_min() == doctest::Approx(1.0).epsilon(1e-12));

  RandomStream rs(7, 0);
  for (int trial = 0; trial < 10; ++trial) {
    Mat W(5, 3);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 3; ++j) W(i, j) = 2.0 * rs.normal();
    const auto padded = pad_independent(W);
    CHECK(padded.s_min() >= 1.0 - 1e-12);

    // s_min(W_tilde)^2 = lambda_min(W^T W) + 1
    Eigen::SelfAdjointEigenSolver<Mat> es(W.transpose() * W);
    const double expect = std::sqrt(es.eigenvalues().minCoeff() + 1.0);
    CHECK(std::abs(padded.s_min() - expect) <= 1e-10);

    // column norms grow by at most 1 (in squared terms, exactly +1)
    for (int j = 0; j < 3; ++j) {
      CHECK(padded.W_tilde.col(j).norm() <= W.col(j).norm() + 1.0);
    }

    // semantics preserved through the lift
    const ClippedReluSum before(W);
    const ClippedReluSum after(padded.W_tilde);
    for (int k = 0; k < 1000; ++k) {
      Vec x(5);
      for (int i = 0; i < 5; ++i) x[i] = rs.normal();
      CHECK(after.eval(padded.lift(x)) == before.eval(x));
    }
    // and W_tilde^T lift(x) == W^T x exactly
    Vec x(5);
    for (int i = 0; i < 5; ++i) x[i] = rs.normal();
    CHECK((padded.W_tilde.transpose() * padded.lift(x) - W.transpose() * x).norm() == 0.0);
  }
}

TEST_CASE("rounding bound: exact complement, the half point, and random sweeps") {
  {
    std::vector<double> g{1.0, 0.0, 1.0, 0.0};
    std::vector<double> f(4);
    for (int i = 0; i < 4; ++i) f[i] = 1.0 - g[i];
    const auto rb = round_and_bound(f, g);
    CHECK(rb.disagreement == 0.0);
    CHECK(rb.mse == 0.0);
    CHECK(rb.inequality_holds);
  }
  {
    // f = 1/2 everywhere: rnd(1/2) = 0 so the rounded predictor is 1;
    // disagreement is the fraction of zeros in g and the MSE is 1/4.
    std::vector<double> f(10, 0.5), g{0, 1, 0, 0, 1, 1, 0, 1, 0, 0};
    const auto rb = round_and_bound(f, g);
    CHECK(rb.mse == doctest::Approx(0.25));
    CHECK(rb.disagreement == doctest::Approx(0.6));
    CHECK(rb.inequality_holds);  // 8 * 0.25 = 2 >= 0.6
  }
  {
    RandomStream rs(9, 0);
    const int n = 100000;
    std::vector<double> f(n), g(n);
    for (int i = 0; i < n; ++i) {
      f[i] = rs.uniform01();
      g[i] = rs.next_u64() & 1 ? 1.0 : 0.0;
    }
    const auto rb = round_and_bound(f, g);
    CHECK(rb.inequality_holds);
    // the inequality is pointwise: every singleton pair satisfies it too
    for (int i = 0; i < 2000; ++i) {
      const auto single = round_and_bound(std::span(&f[i], 1), std::span(&g[i], 1));
      CHECK(single.inequality_holds);
    }
  }
  std::vector<double> f{0.5}, gbad{0.5};
  CHECK_THROWS_AS(round_and_bound(f, gbad), invalid_argument);
}

TEST_CASE("instance JSON round-trip") {
  const auto h = HalfspaceIntersection::random(5, 2, 6, 77);
  const auto round = HalfspaceIntersection::from_json(h.to_json());
  CHECK(round.weights == h.weights);
  CHECK(round.thresholds == h.thresholds);
  CHECK(h.max_param_norm() <= std::sqrt(6.0 * 6.0 * 6.0));
  CHECK_THROWS_AS(HalfspaceIntersection::from_json("{}"), invalid_argument);
}

TEST_SUITE_END();
