#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "zilr/fit.hpp"
#include "zilr/separation.hpp"

using namespace zilr;

namespace {

void check_certificate(const Dataset& data, const SeparationCertificate& c, double tol) {
  REQUIRE(c.status == SeparationStatus::DoublySeparated);
  CHECK(c.v.squaredNorm() + c.w.squaredNorm() == doctest::Approx(1.0));
  const Vector sx = data.X * c.v;
  const Vector sz = data.zmat() * c.w;
  bool strict = false;
  for (int i = 0; i < data.n(); ++i) {
    const double s = data.y[i] == 1.0 ? 1.0 : -1.0;
    CHECK(s * sx[i] >= -tol);
    CHECK(s * sz[i] >= -tol);
    strict = strict || s * sx[i] > tol || s * sz[i] > tol;
  }
  CHECK(strict);
  REQUIRE(c.witness_index.has_value());
}

}  // namespace

TEST_CASE("single zero observation is separated along the negative axis") {
  Dataset d;
  d.y = Vector::Zero(1);
  d.X = Matrix::Ones(1, 1);
  const SeparationCertificate c = detect_double_separation(d);
  check_certificate(d, c, 1e-8);
  CHECK(c.v[0] < 0.0);
  CHECK(c.w[0] < 0.0);
  CHECK(c.v[0] == doctest::Approx(-std::sqrt(0.5)));
}

TEST_CASE("constructed two-point dataset is separated along the slope") {
  const Dataset d = testing::separated_pair();
  const SeparationCertificate c = detect_double_separation(d);
  check_certificate(d, c, 1e-8);
  CHECK(std::abs(c.v[0]) < 1e-12);
  CHECK(std::abs(c.w[0]) < 1e-12);
  CHECK(c.v[1] == doctest::Approx(std::sqrt(0.5)));
  CHECK(c.w[1] == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("identical covariates with both classes are not separated") {
  Dataset d;
  d.y = Vector(2);
  d.y << 1, 0;
  d.X = Matrix(2, 2);
  d.X << 1, 0, 1, 0;
  const SeparationCertificate c = detect_double_separation(d);
  CHECK(c.status == SeparationStatus::NotSeparated);
}

TEST_CASE("random overlapping data is not separated") {
  Rng rng = make_stream(31, 0);
  const Dataset d =
      testing::random_dataset(rng, 200, Vector::Constant(3, 0.3), Vector::Constant(3, 1.0));
  CHECK(detect_double_separation(d).status == SeparationStatus::NotSeparated);
}

TEST_CASE("verify_separating_direction rejects violations") {
  const Dataset d = testing::separated_pair();
  Vector v(2), w(2);
  v << 0, 1;
  w << 0, 1;
  int witness = -1;
  CHECK(verify_separating_direction(d, v, w, 1e-8, &witness));
  CHECK(witness >= 0);
  w << 0, -1;
  CHECK_FALSE(verify_separating_direction(d, v, w, 1e-8));
  CHECK_FALSE(verify_separating_direction(d, Vector::Zero(2), Vector::Zero(2), 1e-8));
}

TEST_CASE("simplex solves a small LP") {
  // max 3x + 2y s.t. x + y <= 4, x + 3y <= 6, x <= 3
  Matrix A(3, 2);
  A << 1, 1, 1, 3, 1, 0;
  Vector b(3), c(2);
  b << 4, 6, 3;
  c << 3, 2;
  const LpResult r = solve_lp_origin_feasible(A, b, c);
  CHECK(r.status == LpResult::Status::Optimal);
  CHECK(r.objective == doctest::Approx(11.0));
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.x[1] == doctest::Approx(1.0));

  Matrix A2(1, 2);
  A2 << 1, -1;
  Vector b2 = Vector::Ones(1), c2(2);
  c2 << 0, 1;
  CHECK(solve_lp_origin_feasible(A2, b2, c2).status == LpResult::Status::Unbounded);
}

TEST_CASE("margin estimate agrees with a brute-force sphere grid") {
  Dataset d;
  d.y = Vector(2);
  d.y << 1, 0;
  d.X = Matrix(2, 2);
  d.X << 1, 0, 1, 0;
  double grid_min = std::numeric_limits<double>::infinity();
  for (const Vector& u : testing::sphere_grid4())
    grid_min = std::min(grid_min, margin_objective(d, u.head(2), u.tail(2)));
  const SeparationCertificate c = estimate_margin(d);
  CHECK(c.objective <= grid_min + 1e-3);
  CHECK(grid_min < 0.0);
  CHECK(c.status == SeparationStatus::Inconclusive);
  CHECK(c.margin == 0.0);
}

TEST_CASE("separated data has no positive margin") {
  const Dataset d = testing::separated_pair();
  const SeparationCertificate c = estimate_margin(d);
  CHECK(c.status == SeparationStatus::Inconclusive);
  CHECK(c.objective <= 1e-8);
}

TEST_CASE("margin dataset certifies a positive margin and a bounded MLE") {
  const Dataset d = testing::margin_dataset();
  validate(d, false);
  CHECK(detect_double_separation(d).status == SeparationStatus::NotSeparated);
  MarginOptions opts;
  opts.threads = 2;
  const SeparationCertificate c = estimate_margin(d, opts);
  REQUIRE(c.status == SeparationStatus::MarginFound);
  CHECK(c.margin >= std::sqrt(0.5) - 1e-6);
  CHECK(c.v.squaredNorm() + c.w.squaredNorm() == doctest::Approx(1.0));

  const FitResult fit = fit_zilr(d, FitConfig{});
  CHECK(fit.converged);
  const double l0 = loglik(d, {Vector::Zero(1), Vector::Zero(1)});
  const double bound = (std::log(2.0) - l0) / c.margin;
  CHECK(fit.params.stacked().norm() <= bound);
}

TEST_CASE("margin estimation is deterministic across thread counts") {
  const Dataset d = testing::margin_dataset();
  MarginOptions one;
  MarginOptions many;
  many.threads = 4;
  const SeparationCertificate a = estimate_margin(d, one);
  const SeparationCertificate b = estimate_margin(d, many);
  CHECK(a.objective == b.objective);
  CHECK(a.v == b.v);
}

TEST_CASE("likelihood increases along a certified separating direction") {
  const Dataset d = testing::separated_pair();
  const SeparationCertificate c = detect_double_separation(d);
  REQUIRE(c.status == SeparationStatus::DoublySeparated);
  const FitResult fit = fit_zilr(d, FitConfig{});
  CHECK_FALSE(fit.converged);
  CHECK(fit.status == OptimStatus::Diverged);
  CHECK(fit.params.stacked().lpNorm<Eigen::Infinity>() > 1e3);
  // From an interior point the likelihood keeps improving along the direction.
  FitConfig short_run;
  short_run.max_iters = 5;
  const ParamPair start = fit_zilr(d, short_run).params;
  double prev = loglik(d, start);
  for (double t : {1.0, 10.0, 100.0}) {
    const ParamPair moved{start.beta + t * c.v, start.gamma + t * c.w};
    const double ll = loglik(d, moved);
    CHECK(ll > prev);
    prev = ll;
  }
}
