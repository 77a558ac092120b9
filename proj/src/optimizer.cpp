#include "zilr/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace zilr {

std::string_view to_string(OptimStatus s) {
  switch (s) {
    case OptimStatus::Converged: return "converged";
    case OptimStatus::MaxIterations: return "max_iterations";
    case OptimStatus::LineSearchFailed: return "line_search_failed";
    case OptimStatus::Diverged: return "diverged";
    case OptimStatus::NonFinite: return "non_finite";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Probe {
  double alpha = 0.0;
  double value = kInf;
  double slope = kInf;  // directional derivative, inf when unknown
  Vector x;
  Vector grad;
};

class LineSearch {
 public:
  LineSearch(const Objective& f, const OptimizerOptions& opts, int& evaluations)
      : f_(f), opts_(opts), evals_(evaluations) {}

  /// Returns true with `out` holding the accepted point.
  bool run(const Vector& x, double f0, double slope0, const Vector& dir, double alpha0,
           double alpha_max, Probe& out) {
    x_ = &x;
    dir_ = &dir;
    f0_ = f0;
    slope0_ = slope0;
    Probe prev;
    prev.alpha = 0.0;
    prev.value = f0;
    prev.slope = slope0;
    double alpha = std::min(alpha0, alpha_max);
    for (int i = 0; i < opts_.max_linesearch; ++i) {
      Probe cur = eval(alpha);
      if (approx_wolfe(cur)) {
        out = std::move(cur);
        return true;
      }
      if (!std::isfinite(cur.value) || cur.value > f0 + opts_.c1 * alpha * slope0 ||
          (i > 0 && cur.value >= prev.value))
        return zoom(prev, cur, out);
      if (std::abs(cur.slope) <= -opts_.c2 * slope0) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, out);
      if (alpha >= alpha_max) {
        // Sufficient decrease holds; the step is capped.
        out = std::move(cur);
        return true;
      }
      prev = std::move(cur);
      alpha = std::min(alpha_max, 4.0 * alpha);
    }
    return false;
  }

 private:
  Probe eval(double alpha) {
    Probe p;
    p.alpha = alpha;
    p.x = *x_ + alpha * *dir_;
    p.value = f_(p.x, p.grad);
    ++evals_;
    if (!std::isfinite(p.value) || !p.grad.allFinite()) {
      p.value = kInf;
      p.slope = kInf;
    } else {
      p.slope = p.grad.dot(*dir_);
    }
    return p;
  }

  // Near a minimizer the decrease condition drowns in rounding error.  Accept a
  // step whose value differs from f0 only at working precision when its
  // directional derivative satisfies the approximate Wolfe bounds.
  bool approx_wolfe(const Probe& p) const {
    if (!std::isfinite(p.value)) return false;
    if (std::abs(p.value - f0_) > 1e-12 * std::abs(f0_)) return false;
    return p.slope >= opts_.c2 * slope0_ && p.slope <= (2.0 * opts_.c1 - 1.0) * slope0_ &&
           std::abs(p.slope) <= -opts_.c2 * slope0_;
  }

  static double interpolate(const Probe& lo, const Probe& hi) {
    const double a = lo.alpha;
    const double b = hi.alpha;
    const double lo_bound = std::min(a, b) + 0.1 * std::abs(b - a);
    const double hi_bound = std::max(a, b) - 0.1 * std::abs(b - a);
    double t = 0.5 * (a + b);
    if (std::isfinite(hi.value) && std::isfinite(hi.slope)) {
      const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
      const double disc = d1 * d1 - lo.slope * hi.slope;
      if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double c = b - (b - a) * (hi.slope + d2 - d1) / (hi.slope - lo.slope + 2.0 * d2);
        if (std::isfinite(c)) t = c;
      }
    }
    return std::clamp(t, lo_bound, hi_bound);
  }

  bool zoom(Probe lo, Probe hi, Probe& out) {
    for (int j = 0; j < opts_.max_linesearch; ++j) {
      const double alpha = interpolate(lo, hi);
      Probe cur = eval(alpha);
      if (approx_wolfe(cur)) {
        out = std::move(cur);
        return true;
      }
      if (!std::isfinite(cur.value) || cur.value > f0_ + opts_.c1 * alpha * slope0_ ||
          cur.value >= lo.value) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opts_.c2 * slope0_) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
      if (std::abs(hi.alpha - lo.alpha) <= 1e-16 * std::max(1.0, lo.alpha)) break;
    }
    // Fall back to the best point with sufficient decrease.
    if (lo.alpha > 0.0 && lo.value < f0_) {
      out = std::move(lo);
      return true;
    }
    return false;
  }

  const Objective& f_;
  const OptimizerOptions& opts_;
  int& evals_;
  const Vector* x_ = nullptr;
  const Vector* dir_ = nullptr;
  double f0_ = 0.0;
  double slope0_ = 0.0;
};

}  // namespace

OptimResult minimize(const Objective& f, Vector x0, const OptimizerOptions& opts) {
  OptimResult res;
  res.x = std::move(x0);
  res.value = f(res.x, res.grad);
  res.evaluations = 1;
  if (!std::isfinite(res.value) || !res.grad.allFinite()) {
    res.status = OptimStatus::NonFinite;
    return res;
  }
  res.trace.push_back(res.value);

  const auto n = res.x.size();
  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  std::deque<double> rho_hist;
  Matrix H;  // full-memory inverse Hessian
  bool h_initialized = false;
  LineSearch ls(f, opts, res.evaluations);

  for (res.iterations = 0;; ++res.iterations) {
    const double tol =
        opts.value_scaled_tol ? opts.grad_tol * std::min(1.0, std::abs(res.value)) : opts.grad_tol;
    if (res.grad.lpNorm<Eigen::Infinity>() <= tol && !(opts.value_scaled_tol && res.value == 0.0)) {
      res.status = OptimStatus::Converged;
      return res;
    }
    if (res.x.lpNorm<Eigen::Infinity>() > opts.divergence_cap) {
      res.status = OptimStatus::Diverged;
      return res;
    }
    if (res.iterations >= opts.max_iters) {
      res.status = OptimStatus::MaxIterations;
      return res;
    }

    Vector dir;
    if (opts.full_memory && h_initialized) {
      dir = -(H * res.grad);
    } else if (!opts.full_memory && !s_hist.empty()) {
      // two-loop recursion
      Vector q = res.grad;
      const auto m = s_hist.size();
      std::vector<double> a(m);
      for (std::size_t k = m; k-- > 0;) {
        a[k] = rho_hist[k] * s_hist[k].dot(q);
        q -= a[k] * y_hist[k];
      }
      const double scale = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= scale;
      for (std::size_t k = 0; k < m; ++k) {
        const double b = rho_hist[k] * y_hist[k].dot(q);
        q += (a[k] - b) * s_hist[k];
      }
      dir = -q;
    } else {
      dir = -res.grad;
    }

    double slope = res.grad.dot(dir);
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      h_initialized = false;
      dir = -res.grad;
      slope = -res.grad.squaredNorm();
    }

    const bool first = opts.full_memory ? !h_initialized : s_hist.empty();
    // Without curvature information, start with a unit-length step.
    const double alpha0 = first ? 1.0 / dir.norm() : 1.0;
    const double dir_inf = dir.lpNorm<Eigen::Infinity>();
    const double alpha_max = 10.0 * std::max(opts.divergence_cap, 1.0) / dir_inf;

    Probe next;
    if (!ls.run(res.x, res.value, slope, dir, alpha0, alpha_max, next)) {
      res.status = OptimStatus::LineSearchFailed;
      return res;
    }

    Vector s = next.x - res.x;
    Vector yv = next.grad - res.grad;
    res.x = std::move(next.x);
    res.value = next.value;
    res.grad = std::move(next.grad);
    res.trace.push_back(res.value);

    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      if (opts.full_memory) {
        if (!h_initialized) {
          H = Matrix::Identity(n, n) * (sy / yv.squaredNorm());
          h_initialized = true;
        }
        const Vector Hy = H * yv;
        const double yHy = yv.dot(Hy);
        H += ((1.0 + rho * yHy) * rho) * (s * s.transpose()) -
             rho * (Hy * s.transpose() + s * Hy.transpose());
      } else {
        s_hist.push_back(std::move(s));
        y_hist.push_back(std::move(yv));
        rho_hist.push_back(rho);
        if (static_cast<int>(s_hist.size()) > opts.memory) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
      }
    }
  }
}

}  // namespace zilr
