#pragma once

// Quasi-Newton minimizer (limited-memory or full-memory BFGS) with a strong
// Wolfe line search.  Used for every likelihood fit in the library.

#include <functional>
#include <string_view>
#include <vector>

#include "zilr/model.hpp"

namespace zilr {

/// Returns f(x) and writes the gradient into grad.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct OptimizerOptions {
  int max_iters = 1000;
  double grad_tol = 1e-6;  // on the infinity norm of the gradient
  int memory = 10;
  bool full_memory = false;      // dense inverse-Hessian BFGS instead of L-BFGS
  double divergence_cap = 1e3;   // stop once ||x||_inf exceeds this
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_linesearch = 60;
  // Converge on ||g||_inf <= grad_tol * min(1, |f|) instead of grad_tol.  Meant
  // for nonnegative objectives such as a negative log-likelihood, whose gradient
  // and value vanish together along a separating direction; there the test never
  // passes and the run ends at the divergence cap.
  bool value_scaled_tol = false;
};

enum class OptimStatus { Converged, MaxIterations, LineSearchFailed, Diverged, NonFinite };

std::string_view to_string(OptimStatus s);

struct OptimResult {
  Vector x;
  double value = 0.0;
  Vector grad;
  int iterations = 0;
  int evaluations = 0;
  OptimStatus status = OptimStatus::MaxIterations;
  /// Objective value after each accepted step, starting with f(x0).
  std::vector<double> trace;

  [[nodiscard]] bool converged() const { return status == OptimStatus::Converged; }
};

OptimResult minimize(const Objective& f, Vector x0, const OptimizerOptions& opts = {});

}  // namespace zilr
