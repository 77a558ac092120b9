#include "zilr/polya_gamma.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace zilr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPiSq = 2.0 * kPi * kPi;

// sum_{k>=1} 1 / ((k - 1/2)^2 + a^2) = pi tanh(pi a) / (2a)
double full_series(double a) {
  if (std::abs(a) < 1e-8) return kPi * kPi / 2.0;
  return kPi * std::tanh(kPi * a) / (2.0 * a);
}

}  // namespace

double pg_mean(double b, double c) {
  if (std::abs(c) < 1e-8) return b / 4.0;
  return b / (2.0 * c) * std::tanh(c / 2.0);
}

double pg_tail_mean(double b, double c, int trunc) {
  const double a2 = c * c / (4.0 * kPi * kPi);
  double head = 0.0;
  for (int k = trunc; k >= 1; --k) {
    const double h = k - 0.5;
    head += 1.0 / (h * h + a2);
  }
  const double tail = full_series(std::abs(c) / (2.0 * kPi)) - head;
  return b / kTwoPiSq * std::max(tail, 0.0);
}

double sample_pg(double b, double c, int trunc, Rng& rng) {
  if (!(b > 0.0)) throw std::invalid_argument("sample_pg: b must be positive");
  if (trunc < 1) throw std::invalid_argument("sample_pg: truncation must be >= 1");
  const double a2 = c * c / (4.0 * kPi * kPi);
  double sum = 0.0;
  if (b == 1.0) {
    for (int k = 1; k <= trunc; ++k) {
      const double h = k - 0.5;
      sum += -std::log(uniform01(rng)) / (h * h + a2);
    }
  } else {
    std::gamma_distribution<double> gamma(b, 1.0);
    for (int k = 1; k <= trunc; ++k) {
      const double h = k - 0.5;
      sum += gamma(rng) / (h * h + a2);
    }
  }
  return sum / kTwoPiSq + pg_tail_mean(b, c, trunc);
}

}  // namespace zilr
