#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "zilr/model.hpp"
#include "zilr/optimizer.hpp"

namespace zilr {

struct FitConfig {
  int max_iters = 1000;
  double grad_tol = 1e-6;
  double init_sd = 0.1;  // initial values ~ N(0, init_sd^2 I)
  std::uint64_t seed = 0;
  bool full_memory = false;     // dense BFGS instead of L-BFGS(10)
  double divergence_cap = 1e3;  // abort when ||params||_inf exceeds this

  void validate() const;
};

struct FitResult {
  ParamPair params;  // gamma is empty for the ordinary logistic fit
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;  // infinity norm
  OptimStatus status = OptimStatus::MaxIterations;
  std::optional<bool> reasonable;  // set when a truth vector was supplied
  double initial_loglik = 0.0;
  std::string message;
};

/// Maximum likelihood for ordinary logistic regression of y on X.
FitResult fit_logistic(const Dataset& data, const FitConfig& cfg);
FitResult fit_logistic(const Dataset& data, const FitConfig& cfg, const Vector& start);

/// Local maximizer of the zero-inflated log-likelihood from a random start.
FitResult fit_zilr(const Dataset& data, const FitConfig& cfg);
FitResult fit_zilr(const Dataset& data, const FitConfig& cfg, const ParamPair& start);

/// Random start drawn exactly as fit_zilr(data, cfg) draws it.
ParamPair initial_point(const Dataset& data, const FitConfig& cfg);

enum class Orientation { Original, Swapped };

struct RelabelResult {
  ParamPair params;
  Orientation chosen = Orientation::Original;
  double sq_dist_original = 0.0;  // ||beta_hat  - beta_lr||^2
  double sq_dist_swapped = 0.0;   // ||gamma_hat - beta_lr||^2
};

/// Picks whichever of (beta, gamma) and (gamma, beta) has its first block
/// closer to the ordinary logistic estimate.  Ties keep the original order.
RelabelResult relabel(const ParamPair& fit, const Vector& beta_lr);

/// False iff some component exceeds ten times the magnitude of its true value.
/// Components whose true value is zero are not screened.
bool screen_reasonable(const Vector& estimate, const Vector& truth);
bool screen_reasonable(const ParamPair& estimate, const ParamPair& truth);

}  // namespace zilr
