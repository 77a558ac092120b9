#include "zilr/fit.hpp"

#include <cmath>
#include <stdexcept>

#include "zilr/rng.hpp"

namespace zilr {

namespace {

OptimizerOptions optimizer_options(const FitConfig& cfg) {
  OptimizerOptions o;
  o.max_iters = cfg.max_iters;
  o.grad_tol = cfg.grad_tol;
  o.full_memory = cfg.full_memory;
  o.divergence_cap = cfg.divergence_cap;
  o.value_scaled_tol = true;
  return o;
}

Vector random_start(int size, const FitConfig& cfg, std::uint64_t stream) {
  Rng rng = make_stream(cfg.seed, stream);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(size);
  for (int j = 0; j < size; ++j) v[j] = cfg.init_sd * normal(rng);
  return v;
}

std::string describe(const OptimResult& r) {
  std::string msg(to_string(r.status));
  if (r.status == OptimStatus::Diverged)
    msg += ": parameter norm exceeded the divergence cap (possible separation)";
  else if (r.status == OptimStatus::NonFinite)
    msg += ": objective is not finite at the starting point";
  return msg;
}

}  // namespace

void FitConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be > 0");
  if (!(init_sd >= 0.0)) throw std::invalid_argument("init_sd must be >= 0");
}

FitResult fit_logistic(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  return fit_logistic(data, cfg, random_start(data.d(), cfg, 1));
}

FitResult fit_logistic(const Dataset& data, const FitConfig& cfg, const Vector& start) {
  cfg.validate();
  const Objective f = [&](const Vector& b, Vector& g) {
    const double v = logistic_loglik_and_grad(data.X, data.y, b, g);
    g = -g;
    return -v;
  };
  const OptimResult r = minimize(f, start, optimizer_options(cfg));
  FitResult out;
  out.params.beta = r.x;
  out.loglik = -r.value;
  out.initial_loglik = r.trace.empty() ? out.loglik : -r.trace.front();
  out.converged = r.converged();
  out.iterations = r.iterations;
  out.grad_norm = r.grad.size() ? r.grad.lpNorm<Eigen::Infinity>() : 0.0;
  out.status = r.status;
  out.message = describe(r);
  return out;
}

ParamPair initial_point(const Dataset& data, const FitConfig& cfg) {
  const Vector v = random_start(data.d() + data.p(), cfg, 2);
  return ParamPair::from_stacked(v, data.d());
}

FitResult fit_zilr(const Dataset& data, const FitConfig& cfg) {
  cfg.validate();
  return fit_zilr(data, cfg, initial_point(data, cfg));
}

FitResult fit_zilr(const Dataset& data, const FitConfig& cfg, const ParamPair& start) {
  cfg.validate();
  const int d = data.d();
  const Objective f = [&](const Vector& v, Vector& g) {
    Gradient gr;
    const double ll = loglik_and_grad(data, ParamPair::from_stacked(v, d), gr);
    g.resize(v.size());
    g << -gr.beta, -gr.gamma;
    return -ll;
  };
  const OptimResult r = minimize(f, start.stacked(), optimizer_options(cfg));
  FitResult out;
  out.params = ParamPair::from_stacked(r.x, d);
  out.loglik = -r.value;
  out.initial_loglik = r.trace.empty() ? out.loglik : -r.trace.front();
  out.converged = r.converged();
  out.iterations = r.iterations;
  out.grad_norm = r.grad.size() ? r.grad.lpNorm<Eigen::Infinity>() : 0.0;
  out.status = r.status;
  out.message = describe(r);
  return out;
}

RelabelResult relabel(const ParamPair& fit, const Vector& beta_lr) {
  if (fit.beta.size() != beta_lr.size() || fit.gamma.size() != beta_lr.size())
    throw std::invalid_argument("relabel: beta, gamma and beta_lr must have equal length");
  RelabelResult r;
  r.sq_dist_original = (fit.beta - beta_lr).squaredNorm();
  r.sq_dist_swapped = (fit.gamma - beta_lr).squaredNorm();
  if (r.sq_dist_swapped < r.sq_dist_original) {
    r.chosen = Orientation::Swapped;
    r.params = fit.swapped();
  } else {
    r.chosen = Orientation::Original;
    r.params = fit;
  }
  return r;
}

bool screen_reasonable(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("screen_reasonable: dimension mismatch");
  for (Eigen::Index j = 0; j < truth.size(); ++j) {
    if (truth[j] == 0.0) continue;
    if (!std::isfinite(estimate[j]) || std::abs(estimate[j]) > 10.0 * std::abs(truth[j]))
      return false;
  }
  return true;
}

bool screen_reasonable(const ParamPair& estimate, const ParamPair& truth) {
  return screen_reasonable(estimate.beta, truth.beta) &&
         screen_reasonable(estimate.gamma, truth.gamma);
}

}  // namespace zilr
