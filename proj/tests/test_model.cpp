#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "zilr/model.hpp"

using namespace zilr;

namespace {

Dataset one_obs(double y) {
  Dataset d;
  d.y = Vector::Constant(1, y);
  d.X = Matrix::Ones(1, 1);
  return d;
}

// Central differences of the log-likelihood, step 1e-5.
Vector numeric_gradient(const Dataset& data, const ParamPair& p) {
  const Vector x = p.stacked();
  const int d = static_cast<int>(p.beta.size());
  Vector g(x.size());
  const double h = 1e-5;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector up = x, dn = x;
    up[j] += h;
    dn[j] -= h;
    g[j] = (loglik(data, ParamPair::from_stacked(up, d)) -
            loglik(data, ParamPair::from_stacked(dn, d))) /
           (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("inv_logit values") {
  CHECK(inv_logit(0.0) == 0.5);
  CHECK(inv_logit(-std::log(2.0)) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(inv_logit(40.0) == doctest::Approx(1.0 - std::exp(-40.0)).epsilon(1e-16));
  CHECK(std::isfinite(inv_logit(1000.0)));
  CHECK(inv_logit(-1000.0) >= 0.0);
  CHECK(inv_logit(1000.0) == 1.0);
}

TEST_CASE("log helpers stay finite at extreme arguments") {
  for (double a : {-800.0, -40.0, 0.0, 40.0, 800.0}) {
    CHECK(std::isfinite(softplus(a)));
    CHECK(std::isfinite(log_inv_logit(a)));
    CHECK(std::isfinite(log1m_inv_logit(a)));
    for (double b : {-700.0, 0.0, 700.0}) CHECK(std::isfinite(log1m_prod_inv_logit(a, b)));
  }
  CHECK(log1m_prod_inv_logit(0.0, 0.0) == doctest::Approx(std::log(0.75)));
  CHECK(log1m_prod_inv_logit(3.0, -2.0) ==
        doctest::Approx(std::log1p(-inv_logit(3.0) * inv_logit(-2.0))).epsilon(1e-13));
}

TEST_CASE("loglik of a single observation at the origin") {
  const ParamPair zero{Vector::Zero(1), Vector::Zero(1)};
  CHECK(loglik(one_obs(1.0), zero) == doctest::Approx(std::log(0.25)).epsilon(1e-14));
  CHECK(loglik(one_obs(0.0), zero) == doctest::Approx(std::log(0.75)).epsilon(1e-14));
}

TEST_CASE("loglik with linear predictors near 700 is finite") {
  Dataset d = one_obs(0.0);
  const ParamPair big{Vector::Constant(1, 700.0), Vector::Constant(1, 700.0)};
  CHECK(std::isfinite(loglik(d, big)));
  d.y[0] = 1.0;
  CHECK(std::isfinite(loglik(d, big)));
  const ParamPair neg{Vector::Constant(1, -700.0), Vector::Constant(1, 700.0)};
  CHECK(std::isfinite(loglik(d, neg)));
}

TEST_CASE("dimension mismatch is rejected") {
  const Dataset d = one_obs(1.0);
  CHECK_THROWS_AS(loglik(d, ParamPair{Vector::Zero(2), Vector::Zero(1)}), std::invalid_argument);
  CHECK_THROWS_AS(grad_loglik(d, ParamPair{Vector::Zero(1), Vector::Zero(3)}),
                  std::invalid_argument);
}

TEST_CASE("validate enforces dataset invariants") {
  Dataset d = one_obs(1.0);
  CHECK_NOTHROW(validate(d));
  d.y[0] = 0.5;
  CHECK_THROWS(validate(d));
  d.y[0] = 1.0;
  d.X(0, 0) = 2.0;
  CHECK_THROWS(validate(d));
  CHECK_NOTHROW(validate(d, false));
  d.X(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(validate(d, false));
}

TEST_CASE("exchange symmetry holds exactly on random shared designs") {
  Rng rng = make_stream(11, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const int d = 1 + rep % 5;
    const Vector b = testing::random_vector(rng, d, 3.0);
    const Vector g = testing::random_vector(rng, d, 3.0);
    const Dataset data = testing::random_dataset(rng, 30, b, g);
    const ParamPair p{testing::random_vector(rng, d, 3.0), testing::random_vector(rng, d, 3.0)};
    CHECK(loglik(data, p) == loglik(data, p.swapped()));
  }
}

TEST_CASE("gradient equals central differences") {
  Rng rng = make_stream(12, 0);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 2 + rep % 4;
    const Dataset data = testing::random_dataset(rng, 40, testing::random_vector(rng, d, 2.0),
                                                 testing::random_vector(rng, d, 2.0));
    const ParamPair p{testing::random_vector(rng, d, 1.7), testing::random_vector(rng, d, 1.7)};
    const Gradient g = grad_loglik(data, p);
    Vector analytic(2 * d);
    analytic << g.beta, g.gamma;
    const Vector numeric = numeric_gradient(data, p);
    worst = std::max(worst, (analytic - numeric).norm() / std::max(1.0, numeric.norm()));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("gradient blocks coincide when beta equals gamma") {
  Rng rng = make_stream(13, 0);
  const Dataset data =
      testing::random_dataset(rng, 50, Vector::Constant(3, 0.5), Vector::Constant(3, -0.2));
  const Vector b = testing::random_vector(rng, 3, 2.0);
  const Gradient g = grad_loglik(data, {b, b});
  CHECK(g.beta == g.gamma);
}

TEST_CASE("single y=1 observation has mirrored gradient components") {
  const Dataset d = one_obs(1.0);
  const Gradient g = grad_loglik(d, {Vector::Constant(1, 0.7), Vector::Constant(1, -1.2)});
  CHECK(g.beta[0] == doctest::Approx(1.0 - inv_logit(0.7)));
  CHECK(g.gamma[0] == doctest::Approx(1.0 - inv_logit(-1.2)));
}

TEST_CASE("loglik and gradient agree with the combined evaluation") {
  Rng rng = make_stream(14, 0);
  const Dataset data =
      testing::random_dataset(rng, 25, Vector::Constant(2, 0.3), Vector::Constant(2, 0.9));
  const ParamPair p{testing::random_vector(rng, 2, 1.0), testing::random_vector(rng, 2, 1.0)};
  Gradient g;
  const double ll = loglik_and_grad(data, p, g);
  CHECK(ll == doctest::Approx(loglik(data, p)).epsilon(1e-14));
  CHECK(ll <= 0.0);
}

TEST_CASE("canonicalize") {
  Vector a(2), b(2);
  a << 1, 2;
  b << 0, 3;
  const EquivClass c1 = canonicalize({a, b});
  const EquivClass c2 = canonicalize({b, a});
  CHECK(c1.canonical.beta == c2.canonical.beta);
  CHECK(c1.canonical.gamma == c2.canonical.gamma);
  CHECK(c1.canonical.beta == b);
  CHECK(c1.swapped);
  CHECK_FALSE(c2.swapped);

  const EquivClass same = canonicalize({a, a});
  CHECK(same.canonical.beta == a);
  CHECK(same.canonical.gamma == a);
  CHECK_FALSE(same.swapped);

  const EquivClass again = canonicalize(c1.canonical);
  CHECK(again.canonical.beta == c1.canonical.beta);
  CHECK(again.canonical.gamma == c1.canonical.gamma);

  CHECK_THROWS_AS(canonicalize({Vector::Zero(2), Vector::Zero(3)}), std::invalid_argument);
}

TEST_CASE("logistic loglik gradient matches finite differences") {
  Rng rng = make_stream(15, 0);
  const Dataset data =
      testing::random_dataset(rng, 40, Vector::Constant(3, 0.4), Vector::Constant(3, 5.0));
  const Vector b = testing::random_vector(rng, 3, 1.0);
  Vector g;
  logistic_loglik_and_grad(data.X, data.y, b, g);
  for (int j = 0; j < 3; ++j) {
    Vector up = b, dn = b;
    up[j] += 1e-5;
    dn[j] -= 1e-5;
    const double fd =
        (logistic_loglik(data.X, data.y, up) - logistic_loglik(data.X, data.y, dn)) / 2e-5;
    CHECK(g[j] == doctest::Approx(fd).epsilon(1e-6));
  }
}
