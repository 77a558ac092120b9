#pragma once

// Existence diagnostics for the zero-inflated MLE.
//
// Double separation: a nonzero direction (v, w) with v'x_i >= 0, w'z_i >= 0 for
// every y_i = 1 and v'x_i <= 0, w'z_i <= 0 for every y_i = 0, at least one of the
// scores nonzero.  Along such a direction the log-likelihood increases without
// bound, so no finite maximizer exists.
//
// Margin: inf over unit (v, w) of
//   max{ -min_{y=1}(v'x + w'z),  max_{y=0} min(v'x, w'z) }.
// A strictly positive value guarantees a finite maximizer.  Any design whose X
// or Z carries a constant column has margin <= 0 (take v or w along that
// column), so a positive margin is only attainable without intercepts.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "zilr/model.hpp"

namespace zilr {

enum class SeparationStatus { DoublySeparated, NotSeparated, MarginFound, Inconclusive };

std::string_view to_string(SeparationStatus s);

struct SeparationCertificate {
  SeparationStatus status = SeparationStatus::Inconclusive;
  Vector v;  // ||v||^2 + ||w||^2 = 1 whenever a direction is reported
  Vector w;
  double margin = 0.0;     // >= 0
  double objective = 0.0;  // raw LP optimum or margin objective (may be negative)
  std::optional<int> witness_index;
  std::string note;
};

/// Solves max sum_i s_i (v'x_i + w'z_i) subject to the sign constraints and
/// ||(v, w)||_inf <= 1, where s_i = +1 for y_i = 1 and -1 otherwise.  Every term
/// is nonnegative on the feasible set, so the optimum is positive exactly when
/// some score can be made strict.  Returned directions are re-verified against
/// the data before a certificate is issued.
SeparationCertificate detect_double_separation(const Dataset& data, double tol = 1e-8);

/// True when (v, w) satisfies every sign constraint within tol and at least one
/// score exceeds tol in magnitude.  Writes the strongest observation to witness.
bool verify_separating_direction(const Dataset& data, const Vector& v, const Vector& w,
                                 double tol, int* witness = nullptr);

/// Margin objective at a (not necessarily unit) direction.
double margin_objective(const Dataset& data, const Vector& v, const Vector& w);

struct MarginOptions {
  int restarts = 64;
  int iters = 500;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Multi-start projected subgradient descent on the unit sphere.  The reported
/// objective is the smallest value found, an upper bound on the infimum, so a
/// MarginFound result is advisory.
SeparationCertificate estimate_margin(const Dataset& data, const MarginOptions& opts = {});

// --- dense LP -------------------------------------------------------------

struct LpResult {
  enum class Status { Optimal, Unbounded, IterationLimit } status = Status::Optimal;
  Vector x;
  double objective = 0.0;
  int pivots = 0;
};

/// max c'x  s.t.  A x <= b, x >= 0, with b >= 0 (the origin is feasible).
/// Condensed-tableau simplex with Bland's rule.
LpResult solve_lp_origin_feasible(const Matrix& A, const Vector& b, const Vector& c,
                                  int max_pivots = 100000);

}  // namespace zilr
