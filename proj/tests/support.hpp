#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "zilr/model.hpp"
#include "zilr/rng.hpp"

namespace zilr::testing {

/// Shared-design dataset with an intercept and N(0,1) covariates, responses drawn
/// from the zero-inflated model at (beta, gamma).
inline Dataset random_dataset(Rng& rng, int n, const Vector& beta, const Vector& gamma) {
  std::normal_distribution<double> normal;
  const int d = static_cast<int>(beta.size());
  Dataset data;
  data.X.resize(n, d);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.X(i, 0) = 1.0;
    for (int j = 1; j < d; ++j) data.X(i, j) = normal(rng);
    const double prob = inv_logit(data.X.row(i).dot(gamma)) * inv_logit(data.X.row(i).dot(beta));
    data.y[i] = uniform01(rng) < prob ? 1.0 : 0.0;
  }
  return data;
}

inline Vector random_vector(Rng& rng, int size, double scale) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Vector v(size);
  for (int j = 0; j < size; ++j) v[j] = unif(rng);
  return v;
}

}  // namespace zilr::testing

namespace zilr::testing {

/// y = (1, 0) with x = z = ((1, 1), (1, -1)); separated along v = w = (0, 1).
inline Dataset separated_pair() {
  Dataset d;
  d.y = Vector(2);
  d.y << 1, 0;
  d.X = Matrix(2, 2);
  d.X << 1, 1, 1, -1;
  return d;
}

/// Non-shared design without intercepts whose y = 1 points surround the origin
/// in (x, z), so every unit direction has margin objective >= 1/sqrt(2).
inline Dataset margin_dataset() {
  Dataset d;
  d.y = Vector(7);
  d.y << 1, 1, 1, 1, 0, 0, 0;
  d.X = Matrix(7, 1);
  Matrix Z(7, 1);
  d.X << 1, -1, 0, 0, 0.5, -0.3, 0.2;
  Z << 0, 0, 1, -1, 0.5, 0.2, -0.6;
  d.Z = Z;
  return d;
}

/// Unit vectors in R^4 on a hyperspherical-angle grid (10 x 10 x 100 = 10^4).
inline std::vector<Vector> sphere_grid4() {
  std::vector<Vector> out;
  const double pi = 3.14159265358979323846;
  for (int a = 0; a < 10; ++a) {
    const double t1 = pi * (a + 0.5) / 10.0;
    for (int b = 0; b < 10; ++b) {
      const double t2 = pi * (b + 0.5) / 10.0;
      for (int c = 0; c < 100; ++c) {
        const double t3 = 2.0 * pi * c / 100.0;
        Vector u(4);
        u[0] = std::cos(t1);
        u[1] = std::sin(t1) * std::cos(t2);
        u[2] = std::sin(t1) * std::sin(t2) * std::cos(t3);
        u[3] = std::sin(t1) * std::sin(t2) * std::sin(t3);
        out.push_back(u);
      }
    }
  }
  return out;
}

}  // namespace zilr::testing
