#include "core/oracle_sim.hpp"
#include "core/rng.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace plateau;

TEST_SUITE_BEGIN("oracle_sim");

namespace {

Problem cosine_problem(int d, double wstar_norm, std::uint64_t dir_seed = 0x77) {
  Vec wstar = sphere_points(d, wstar_norm, 1, dir_seed).row(0).transpose();
  return Problem(GaussianMixture::standard(d), PeriodicFn::cosine(), wstar,
                 PredictorFamily::cosine(d));
}

}  // namespace

TEST_CASE("epsilon recipe reproduces its declared formula") {
  const auto mixture = GaussianMixture::standard(30);
  const double eps = epsilon_recipe(mixture, PredictorFamily::cosine(30), 8.0);
  const double series = bound_tail_sum(mixture.epsilon_profile(), 2.0, 50).value();
  const double expect = std::cbrt(kFourPiSq * 30.0 * (std::exp(-30.0) + series));
  CHECK(eps == doctest::Approx(expect).epsilon(1e-12));
  CHECK(eps > 0.0);
  CHECK(eps < 1e-3);
}

TEST_CASE("oracle at the origin: true and mean gradients both vanish") {
  const auto prob = cosine_problem(6, 2.0);
  OracleConfig oc;
  oc.epsilon = 1e-10;
  oc.mean_draws = 2000;
  SphereMeanGradient mean(prob, oc);
  const auto resp = oracle_query(prob, mean, oc.epsilon, Vec::Zero(6));
  CHECK(resp.mean_branch);
  CHECK(resp.gradient.norm() <= 1e-12);
}

TEST_CASE("oracle branches: plateau probes take the mean, near-target probes the truth") {
  {
    const auto prob = cosine_problem(20, 6.0);
    OracleConfig oc;
    oc.epsilon = 1e-10;
    oc.mean_draws = 2000;
    SphereMeanGradient mean(prob, oc);
    RandomStream rs(3, 0);
    const Vec w = sphere_point(20, 1.0, rs);
    const auto resp = oracle_query(prob, mean, oc.epsilon, w);
    CHECK(resp.mean_branch);  // closed-form distance is astronomically small
    CHECK(resp.distance <= 1e-10);
  }
  {
    const auto prob = cosine_problem(5, 2.0);  // r = 1
    OracleConfig oc;
    oc.epsilon = 1e-10;
    oc.mean_draws = 2000;
    SphereMeanGradient mean(prob, oc);
    const auto resp = oracle_query(prob, mean, oc.epsilon, prob.w_star);
    CHECK(!resp.mean_branch);  // the gradient near w_star carries signal
    CHECK(resp.distance > 1e-6);
  }
}

TEST_CASE("oracle branch distances are consistent with the branch taken") {
  const auto prob = cosine_problem(8, 1.0);
  OracleConfig oc;
  oc.epsilon = 1e-8;
  oc.mean_draws = 1000;
  SphereMeanGradient mean(prob, oc);
  RandomStream rs(5, 0);
  for (int t = 0; t < 20; ++t) {
    const Vec w = rs.uniform(0.2, 2.0) * sphere_point(8, 1.0, rs);
    const auto resp = oracle_query(prob, mean, oc.epsilon, w);
    if (resp.mean_branch) {
      CHECK(resp.distance <= oc.epsilon);
    } else {
      CHECK(resp.distance > oc.epsilon);
    }
  }
}

TEST_CASE("sphere-mean MC agrees with the 1-D quadrature cross-check") {
  const auto prob = cosine_problem(6, 1.5);
  OracleConfig oc;
  oc.epsilon = 1.0;
  oc.mean_draws = 60000;
  SphereMeanGradient mean(prob, oc);
  RandomStream rs(7, 0);
  for (int t = 0; t < 3; ++t) {
    const Vec w = rs.uniform(0.3, 1.2) * sphere_point(6, 1.0, rs);
    const auto& mc = mean.at(w);
    const Vec quad = mean.quadrature_mean(w);
    CHECK((mc.mean - quad).norm() <= 4.0 * mc.approx_error + 1e-12);
  }
  // and the quadrature itself is sane at the origin
  CHECK(mean.quadrature_mean(Vec::Zero(6)).norm() <= 1e-12);
}

TEST_CASE("trainer determinism: identical seeds give identical bytes") {
  const auto prob = cosine_problem(5, 1.0);
  Trainer t;
  t.kind = Trainer::Kind::GD;
  t.schedule.eta = 0.02;
  t.steps = 100;
  t.init.kind = InitRule::Kind::RandomUnit;
  GradientSource honest;
  honest.kind = GradientSource::Kind::Honest;
  const auto a = run_trainer(prob, t, honest, 99);
  const auto b = run_trainer(prob, t, honest, 99);
  CHECK(a.identical_to(b));
  const auto c = run_trainer(prob, t, honest, 100);
  CHECK(!a.identical_to(c));
}

TEST_CASE("honest GD near the minimum converges into the basin") {
  const auto prob = cosine_problem(5, 1.0);  // r = 0.5
  Trainer t;
  t.kind = Trainer::Kind::GD;
  t.schedule.eta = 0.01;
  t.steps = 500;
  t.init.kind = InitRule::Kind::NearTarget;
  t.init.offset = 0.01;
  GradientSource honest;
  honest.kind = GradientSource::Kind::Honest;
  const auto rec = run_trainer(prob, t, honest, 1);
  CHECK(rec.final_objective < 1e-6);
}

TEST_CASE("honest GD from a random unit init stalls on the plateau") {
  const auto prob = cosine_problem(20, 8.0);  // r = 4
  Trainer t;
  t.kind = Trainer::Kind::GD;
  t.schedule.eta = 0.1;
  t.steps = 10000;
  t.record_every = 1000;
  t.init.kind = InitRule::Kind::RandomUnit;
  GradientSource honest;
  honest.kind = GradientSource::Kind::Honest;
  const auto rec = run_trainer(prob, t, honest, 2);
  CHECK(rec.final_objective >= 0.99);
}

TEST_CASE("divergent steps raise a numeric failure with the iteration index") {
  const auto prob = cosine_problem(3, 0.5);
  Trainer t;
  t.kind = Trainer::Kind::GD;
  // the gradient peaks near ||w - w_star|| = 1/(2 pi) at ~3.8, so this
  // step overflows the very first update
  t.schedule.eta = 1.6e308;
  t.steps = 50;
  t.init.kind = InitRule::Kind::NearTarget;
  t.init.offset = 0.16;
  GradientSource honest;
  honest.kind = GradientSource::Kind::Honest;
  try {
    run_trainer(prob, t, honest, 3);
    FAIL("expected numeric_failure");
  } catch (const numeric_failure& e) {
    CHECK(e.iteration() == 1);
  }

  StepSchedule inv{StepSchedule::Kind::InvSqrt, 0.1};
  CHECK(inv.at(4) == doctest::Approx(0.05));
}

TEST_CASE("oracle-driven runs are independent of the target; honest runs are not") {
  // oracle: deep plateau, everything mean-branch, all pairs identical
  {
    const auto prob = cosine_problem(30, 8.0);
    OracleConfig oc;
    oc.epsilon = epsilon_recipe(prob.mixture, prob.family, 8.0);
    oc.mean_draws = 2000;
    GradientSource source;
    source.kind = GradientSource::Kind::Oracle;
    source.mean = std::make_shared<SphereMeanGradient>(prob, oc);
    source.epsilon = oc.epsilon;
    Trainer t;
    t.kind = Trainer::Kind::GD;
    t.schedule.eta = 0.1;
    t.steps = 200;
    t.init.kind = InitRule::Kind::RandomUnit;
    const auto rep = trajectory_independence_check(prob, 4, t, source, 11);
    CHECK(rep.identical_pairs == rep.total_pairs);
    CHECK(rep.true_branch_total == 0);
    CHECK(rep.oracle_valid);
  }
  // honest gradients with a small radius: targets diverge almost at once
  {
    const auto prob = cosine_problem(3, 0.5);  // r = 0.25
    GradientSource honest;
    honest.kind = GradientSource::Kind::Honest;
    Trainer t;
    t.kind = Trainer::Kind::GD;
    t.schedule.eta = 0.05;
    t.steps = 50;
    t.init.kind = InitRule::Kind::RandomUnit;
    const auto rep = trajectory_independence_check(prob, 4, t, honest, 13);
    CHECK(rep.identical_pairs == 0);
    CHECK(rep.earliest_divergence >= 1);
    CHECK(rep.earliest_divergence <= 10);
  }
  // zero steps: trivially identical
  {
    const auto prob = cosine_problem(3, 0.5);
    GradientSource honest;
    honest.kind = GradientSource::Kind::Honest;
    Trainer t;
    t.steps = 0;
    const auto rep = trajectory_independence_check(prob, 3, t, honest, 17);
    CHECK(rep.identical_pairs == rep.total_pairs);
  }
}

TEST_CASE("minibatch SGD matches population GD on the plateau configuration") {
  const auto prob = cosine_problem(20, 8.0);
  Trainer t;
  t.kind = Trainer::Kind::SGD;
  t.schedule.eta = 0.1;
  t.steps = 300;
  t.sgd_batch = 64;
  t.record_every = 100;
  t.init.kind = InitRule::Kind::RandomUnit;
  GradientSource mb;
  mb.kind = GradientSource::Kind::Minibatch;
  const auto sgd = run_trainer(prob, t, mb, 23);

  Trainer tg = t;
  tg.kind = Trainer::Kind::GD;
  GradientSource honest;
  honest.kind = GradientSource::Kind::Honest;
  const auto gd = run_trainer(prob, tg, honest, 23);
  CHECK(std::abs(sgd.final_objective - gd.final_objective) < 0.05);
}

TEST_CASE("normalized GD moves with unit steps even on tiny gradients") {
  const auto prob = cosine_problem(6, 4.0);
  Trainer t;
  t.kind = Trainer::Kind::NormalizedGD;
  t.schedule.eta = 0.05;
  t.steps = 5;
  t.init.kind = InitRule::Kind::RandomUnit;
  GradientSource honest;
  honest.kind = GradientSource::Kind::Honest;
  const auto rec = run_trainer(prob, t, honest, 29);
  REQUIRE(rec.steps.size() == 5);
  const double moved = (rec.steps[1].w - rec.steps[0].w).norm();
  CHECK(moved == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_SUITE_END();
