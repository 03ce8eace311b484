#include "core/periodic.hpp"
#include "core/rng.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace plateau;
using plateau::testing::adaptive_simpson;

TEST_SUITE_BEGIN("periodic");

TEST_CASE("pointwise values of the built-ins") {
  const auto cos_fn = PeriodicFn::cosine();
  CHECK(cos_fn(0.0) == doctest::Approx(1.0));
  CHECK(std::abs(cos_fn(0.25)) < 1e-15);

  const auto tri = PeriodicFn::triangle();
  CHECK(tri(0.0) == doctest::Approx(1.0));
  CHECK(tri(0.5) == doctest::Approx(-1.0));
  CHECK(tri(0.25) == doctest::Approx(0.0));

  const auto sq = PeriodicFn::square();
  CHECK(sq(0.1) == 1.0);
  CHECK(sq(0.6) == -1.0);
}

TEST_CASE("periodicity and range on random points") {
  RandomStream rs(5, 0);
  for (const auto& psi : {PeriodicFn::cosine(), PeriodicFn::triangle(), PeriodicFn::square()}) {
    for (int i = 0; i < 1000; ++i) {
      const double t = rs.uniform(-50.0, 50.0);
      CHECK(std::abs(psi(t + 1.0) - psi(t)) <= 1e-12);
      CHECK(std::abs(psi(t)) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("cosine coefficients are exactly a_{+-1} = 1/2") {
  const auto fc = PeriodicFn::cosine().fourier_coeffs(5);
  CHECK(fc.a(1) == std::complex<double>(0.5, 0.0));
  CHECK(fc.a(-1) == std::complex<double>(0.5, 0.0));
  for (int z : {0, 2, 3, 4, 5}) {
    CHECK(std::abs(fc.a(z)) == 0.0);
  }
}

namespace {

// Quadrature oracle: a_z = integral_0^1 psi(t) exp(-2 pi i z t) dt.
std::complex<double> coeff_oracle(const PeriodicFn& psi, int z) {
  auto re = [&](double t) { return psi(t) * std::cos(2.0 * kPi * z * t); };
  auto im = [&](double t) { return -psi(t) * std::sin(2.0 * kPi * z * t); };
  // integrate in halves so the square wave's jump sits on a boundary
  return {adaptive_simpson(re, 0.0, 0.5, 1e-13) + adaptive_simpson(re, 0.5, 1.0, 1e-13),
          adaptive_simpson(im, 0.0, 0.5, 1e-13) + adaptive_simpson(im, 0.5, 1.0, 1e-13)};
}

}  // namespace

TEST_CASE("square-wave coefficients match the textbook series and quadrature") {
  const auto sq = PeriodicFn::square();
  const auto fc = sq.fourier_coeffs(9);
  for (int z = -9; z <= 9; ++z) {
    if (z != 0 && z % 2 != 0) {
      CHECK(std::abs(std::abs(fc.a(z)) - 2.0 / (kPi * std::abs(z))) < 1e-12);
    } else {
      CHECK(std::abs(fc.a(z)) == 0.0);
    }
    CHECK(std::abs(fc.a(z) - coeff_oracle(sq, z)) < 1e-8);
  }
}

TEST_CASE("triangle and custom coefficients agree with the quadrature oracle") {
  const auto tri = PeriodicFn::triangle();
  const auto custom = PeriodicFn::piecewise_linear(
      {{0.0, 0.2}, {0.15, 0.9}, {0.4, -0.6}, {0.7, -0.1}, {0.9, 0.5}});
  for (const auto& psi : {tri, custom}) {
    const auto fc = psi.fourier_coeffs(8);
    for (int z = -8; z <= 8; ++z) {
      CHECK(std::abs(fc.a(z) - coeff_oracle(psi, z)) < 1e-10);
    }
  }
}

TEST_CASE("coefficients are Hermitian and the series is real") {
  const auto psi = PeriodicFn::piecewise_linear({{0.0, 0.1}, {0.3, 0.8}, {0.6, -0.9}});
  const auto fc = psi.fourier_coeffs(50);
  for (int z = 1; z <= 50; ++z) {
    CHECK(std::abs(fc.a(-z) - std::conj(fc.a(z))) < 1e-14);
  }
  RandomStream rs(9, 0);
  for (int i = 0; i < 200; ++i) {
    const double t = rs.uniform01();
    CHECK(std::abs(fc.eval_series(t).imag()) <= 1e-10);
  }
}

TEST_CASE("series reconstruction error scales with the truncation order") {
  // Continuous piecewise-linear functions have |a_z| = O(1/z^2); the
  // truncated series converges uniformly at rate O(1/Z).
  const auto psi = PeriodicFn::piecewise_linear(
      {{0.0, 0.0}, {0.2, 0.8}, {0.5, -0.4}, {0.8, -1.0}});
  RandomStream rs(21, 0);
  for (int zmax : {50, 200}) {
    const auto fc = psi.fourier_coeffs(zmax);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double t = rs.uniform01();
      worst = std::max(worst, std::abs(fc.eval_series(t).real() - psi(t)));
    }
    CHECK(worst < 12.0 / zmax);
  }
}

TEST_CASE("Parseval: sum of squared moduli matches the mean square") {
  for (const auto& psi : {PeriodicFn::cosine(), PeriodicFn::triangle()}) {
    const auto fc = psi.fourier_coeffs(200);
    CHECK(std::abs(fc.sum_sq_moduli() - psi.mean_square()) < 1e-6);
    CHECK(fc.sum_sq_moduli() <= 1.0 + 1e-12);
  }
  // Square wave coefficients decay like 1/z, tested in mean square.
  const auto sq = PeriodicFn::square();
  const auto fc = sq.fourier_coeffs(200);
  CHECK(std::abs(fc.sum_sq_moduli() - sq.mean_square()) < 2e-3);

  // L2 reconstruction for the square wave (Gibbs keeps pointwise error
  // near jumps, but the mean-square error shrinks).
  double mse = 0.0;
  const int grid = 4001;
  for (int i = 0; i < grid; ++i) {
    const double t = (i + 0.5) / grid;
    const double e = fc.eval_series(t).real() - sq(t);
    mse += e * e / grid;
  }
  CHECK(mse < 1e-3);
}

TEST_CASE("relu realization: triangle on [0,1] is exact with three units") {
  const auto net = PeriodicFn::triangle().as_relu_network(0.0, 1.0);
  CHECK(net.size() == 3);
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    CHECK(std::abs(net.eval(t) - PeriodicFn::triangle()(t)) <= 1e-12);
  }
}

TEST_CASE("relu realization: triangle on [-2,2] within the breakpoint budget") {
  const auto tri = PeriodicFn::triangle();
  const auto net = tri.as_relu_network(-2.0, 2.0);
  // breakpoint-count oracle: 1 + slope changes in [-2, 2)
  CHECK(net.size() <= 9);
  for (int i = 0; i <= 1000; ++i) {
    const double t = -2.0 + 4.0 * i / 1000.0;
    CHECK(std::abs(net.eval(t) - tri(t)) <= 1e-12);
  }
}

TEST_CASE("relu realization: four-segment sawtooth is exact on [0,1]") {
  const auto psi = PeriodicFn::piecewise_linear(
      {{0.0, 0.0}, {0.25, 1.0}, {0.5, 0.0}, {0.75, -1.0}});
  const auto net = psi.as_relu_network(0.0, 1.0);
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    CHECK(std::abs(net.eval(t) - psi(t)) <= 1e-12);
  }
}

TEST_CASE("relu realization rejects non-piecewise-linear shapes") {
  CHECK_THROWS_AS(PeriodicFn::cosine().as_relu_network(0.0, 1.0), unsupported);
  CHECK_THROWS_AS(PeriodicFn::square().as_relu_network(0.0, 1.0), unsupported);
  CHECK_THROWS_AS(PeriodicFn::triangle().as_relu_network(1.0, 0.0), invalid_argument);
}

TEST_CASE("JSON: custom breakpoint lists load and validate") {
  const auto psi = PeriodicFn::from_json(R"({"kind":"pl","points":[[0.0,0.5],[0.5,-0.5]]})");
  CHECK(psi(0.0) == doctest::Approx(0.5));
  CHECK(psi(0.25) == doctest::Approx(0.0));
  const auto round = PeriodicFn::from_json(psi.to_json());
  CHECK(round(0.77) == doctest::Approx(psi(0.77)));

  CHECK_THROWS_AS(PeriodicFn::from_json(R"({"kind":"pl","points":[[0.5,0.1],[0.2,0.0]]})"),
                  invalid_argument);
  CHECK_THROWS_AS(PeriodicFn::from_json(R"({"kind":"pl","points":[[0.0,2.0]]})"),
                  invalid_argument);
  CHECK_THROWS_AS(PeriodicFn::from_json(R"({"kind":"nope"})"), invalid_argument);
  CHECK_THROWS_AS(PeriodicFn::cosine().fourier_coeffs(0), invalid_argument);
}

TEST_SUITE_END();
