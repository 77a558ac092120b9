#pragma once

// Zero-inflated logistic regression: observed-data likelihood, gradient and the
// exchange symmetry of the shared-design model.
//
//   P(y = 1 | x, z) = F(gamma' z) * F(beta' x),   F = inverse logit.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace zilr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Binary responses with a design for the outcome component (X) and, optionally,
/// a separate design for the structural-zero component (Z).  When Z is absent
/// both components share X.
struct Dataset {
  Vector y;  // entries in {0, 1}
  Matrix X;
  std::optional<Matrix> Z;
  std::vector<std::string> column_names;

  [[nodiscard]] int n() const { return static_cast<int>(y.size()); }
  [[nodiscard]] int d() const { return static_cast<int>(X.cols()); }
  [[nodiscard]] int p() const { return static_cast<int>(zmat().cols()); }
  [[nodiscard]] const Matrix& zmat() const { return Z ? *Z : X; }
  [[nodiscard]] bool shared_design() const { return !Z.has_value(); }
};

/// Throws std::invalid_argument when the dataset breaks an invariant.  The
/// intercept requirement can be lifted for diagnostic constructions.
void validate(const Dataset& data, bool require_intercept = true);

struct ParamPair {
  Vector beta;
  Vector gamma;

  [[nodiscard]] ParamPair swapped() const { return {gamma, beta}; }
  /// (beta || gamma)
  [[nodiscard]] Vector stacked() const;
  static ParamPair from_stacked(const Eigen::Ref<const Vector>& v, int d);
};

/// Representative of [beta, gamma] under the exchange relation.
struct EquivClass {
  ParamPair canonical;
  bool swapped = false;  // true when canonical == (gamma, beta) of the input
};

// --- scalar helpers ------------------------------------------------------

/// exp(mu) / (1 + exp(mu)) without overflow.
double inv_logit(double mu);
/// log F(mu)
double log_inv_logit(double mu);
/// log(1 - F(mu)) = log F(-mu)
double log1m_inv_logit(double mu);
/// log(1 + exp(mu))
double softplus(double mu);
/// log{1 - F(a) F(b)}.  log1p(-F(a)F(b)) while the product is below 1/2,
/// otherwise log(e^-a + e^-b + e^-a-b) - log(1 + e^-a) - log(1 + e^-b).
double log1m_prod_inv_logit(double a, double b);

// --- likelihood ------------------------------------------------------------

double loglik(const Dataset& data, const ParamPair& params);

struct Gradient {
  Vector beta;
  Vector gamma;
};

Gradient grad_loglik(const Dataset& data, const ParamPair& params);

/// Log-likelihood and gradient in one pass over the data.
double loglik_and_grad(const Dataset& data, const ParamPair& params, Gradient& grad);

/// Ordinary logistic log-likelihood sum_i y_i log F(x_i'b) + (1-y_i) log(1-F(x_i'b)).
double logistic_loglik(const Matrix& X, const Vector& y, const Vector& beta);
double logistic_loglik_and_grad(const Matrix& X, const Vector& y, const Vector& beta,
                                Vector& grad);

/// Lexicographically smaller of (beta||gamma) and (gamma||beta).
/// Throws std::invalid_argument if the two blocks differ in length.
EquivClass canonicalize(const ParamPair& params);

}  // namespace zilr
