#include <doctest.h>

#include <cmath>

#include "zilr/experiments.hpp"

using namespace zilr;

TEST_CASE("structural zero fractions of the presets") {
  const double very_low = structural_zero_fraction(scenario_preset("VeryLow"), 100000, 11);
  const double high = structural_zero_fraction(scenario_preset("High"), 100000, 11);
  CHECK(std::abs(very_low - 0.038) <= 0.005);
  CHECK(std::abs(high - 0.334) <= 0.005);
  const double low = structural_zero_fraction(scenario_preset("Low"), 100000, 11);
  const double mod = structural_zero_fraction(scenario_preset("Moderate"), 100000, 11);
  CHECK(very_low < low);
  CHECK(low < mod);
  CHECK(mod < high);
}

TEST_CASE("preset shapes and unknown names") {
  for (const std::string& name : scenario_names()) {
    const Scenario s = scenario_preset(name);
    CHECK_NOTHROW(s.validate());
    CHECK(s.beta_true.size() == 5);
  }
  CHECK(scenario_preset("S2").n == 2000);
  CHECK(scenario_preset("S3").covariates[3] == CovariateKind::Bernoulli);
  CHECK_THROWS_AS(scenario_preset("Nope"), std::invalid_argument);
}

TEST_CASE("generate is reproducible and consistent") {
  Scenario s = scenario_preset("S3");
  s.n = 300;
  const GeneratedData a = generate(s, 4);
  const GeneratedData b = generate(s, 4);
  const GeneratedData c = generate(s, 5);
  CHECK(a.data.X == b.data.X);
  CHECK(a.data.y == b.data.y);
  CHECK(a.data.X != c.data.X);
  for (int i = 0; i < s.n; ++i) {
    CHECK(a.data.y[i] == a.h[i] * a.y_star[i]);
    CHECK(a.data.X(i, 0) == 1.0);
    CHECK((a.data.X(i, 3) == 0.0 || a.data.X(i, 3) == 1.0));
  }
  CHECK_NOTHROW(validate(a.data));
}

TEST_CASE("h is identically one when the gamma intercept is huge") {
  Scenario s = scenario_preset("Moderate");
  s.gamma_true[0] = 60.0;
  s.n = 200;
  const GeneratedData g = generate(s, 0);
  for (int i = 0; i < s.n; ++i) CHECK(g.h[i] == 1);
  CHECK(structural_zero_fraction(s, 1000, 3) < 1e-20);
}

TEST_CASE("logistic regression is nearly unbiased without structural zeros") {
  Scenario s = scenario_preset("Moderate");
  s.gamma_true[0] = 60.0;
  s.reps = 40;
  SimulationOptions opts;
  opts.threads = 1;
  const SimSummary sum = run_simulation(s, opts);
  const MethodSummary& lr = sum.get(Method::StandardLR);
  CHECK(lr.total == 40);
  CHECK(lr.failed == 0);
  CHECK(lr.reasonable == 40);
  for (Eigen::Index j = 0; j < lr.bias.size(); ++j) {
    // 3 standard errors of the replicate mean plus the O(1/n) MLE bias
    CHECK(std::abs(lr.bias[j]) <= 3.0 * lr.sd[j] / std::sqrt(40.0) + 0.02);
  }
}

TEST_CASE("simulation counts add up and are reproducible") {
  Scenario s = scenario_preset("High");
  s.reps = 6;
  s.n = 400;
  SimulationOptions opts;
  opts.threads = 2;
  const SimSummary a = run_simulation(s, opts);
  opts.threads = 1;
  const SimSummary b = run_simulation(s, opts);
  for (Method m : {Method::Proposed, Method::StandardLR, Method::NaiveZILR}) {
    const MethodSummary& x = a.get(m);
    CHECK(x.reasonable + x.unreasonable + x.failed == x.total);
    CHECK(x.total == 6);
  }
  for (std::size_t r = 0; r < a.reps.size(); ++r) {
    CHECK(a.reps[r].lr_beta == b.reps[r].lr_beta);
    CHECK(a.reps[r].proposed.stacked() == b.reps[r].proposed.stacked());
    // proposed is the naive fit or its exchange
    const bool same = a.reps[r].proposed.stacked() == a.reps[r].naive.stacked();
    const bool swapped = a.reps[r].proposed.stacked() == a.reps[r].naive.swapped().stacked();
    CHECK((same || swapped));
  }
  CHECK(a.get(Method::StandardLR).bias.size() == 5);
  CHECK(a.get(Method::Proposed).bias.size() == 10);
}

TEST_CASE("summarize handles failures and empty reasonable sets") {
  const Scenario s = scenario_preset("High");
  std::vector<RepResult> reps(3);
  for (RepResult& r : reps) r.error = "boom";
  const MethodSummary m = summarize(reps, Method::Proposed, s);
  CHECK(m.failed == 3);
  CHECK(m.reasonable == 0);
  CHECK(std::isnan(m.bias[0]));
  CHECK(m.ratio() == 0.0);
}

TEST_CASE("sign flip of the misspecified logistic slope") {
  SignFlipConfig cfg;
  cfg.mc_samples = 50000;
  const SignFlipResult r = run_signflip(cfg);
  REQUIRE(r.rows.size() == cfg.c_grid.size());
  for (const SignFlipRow& row : r.rows) CHECK(row.converged);
  const auto at = [&](double c) {
    for (const SignFlipRow& row : r.rows)
      if (row.c == c) return row;
    FAIL("missing c");
    return SignFlipRow{};
  };
  CHECK(at(0.0).t_star > 0.0);
  CHECK(at(-8.0).t_star < 0.0);
  CHECK(at(0.0).f_hat > 0.0);
  CHECK(at(-8.0).f_hat < 0.0);
  CHECK(r.f_monotone);
  CHECK(r.t_monotone);
  REQUIRE(r.sign_change.has_value());
  CHECK(r.sign_change->first < r.sign_change->second);
  // sign of t* follows the sign of E[pi x]
  for (const SignFlipRow& row : r.rows)
    if (std::abs(row.f_hat) > 3.0 * row.f_se) CHECK((row.t_star > 0) == (row.f_hat > 0));
}

TEST_CASE("sign flip config validation") {
  SignFlipConfig cfg;
  cfg.a = 0.0;
  CHECK_THROWS_AS(run_signflip(cfg), std::invalid_argument);
  cfg = {};
  cfg.c_grid = {0.5};
  CHECK_THROWS_AS(run_signflip(cfg), std::invalid_argument);
}

TEST_CASE("short bimodality run on S3") {
  SamplerConfig cfg = bimodality_sampler_config(false, 5);
  cfg.total_iters = 500;
  cfg.burn_in = 100;
  cfg.n_replicas = 3;
  Scenario s = scenario_preset("S3");
  s.n = 400;
  KMeansOptions km;
  km.seed = 1;
  const BimodalityResult b = run_bimodality(s, cfg, {}, km);
  CHECK(b.draws.draws.rows() == 400);
  CHECK(b.clusters.assignments.size() == 400);
  CHECK(b.canonical_draws.rows() == 400);
  CHECK(!b.verdict.empty());
  for (Eigen::Index i = 0; i < b.canonical_draws.rows(); ++i)
    CHECK(b.canonical_draws(i, 0) <= b.canonical_draws(i, 5));
}
