#include "zilr/gibbs.hpp"

#include <cmath>
#include <stdexcept>

#include "checkpoint.hpp"
#include "zilr/parallel.hpp"
#include "zilr/polya_gamma.hpp"

namespace zilr {

void SamplerConfig::validate(int d, int p) const {
  if (n_replicas < 1) throw std::invalid_argument("n_replicas must be >= 1");
  if (n_replicas > 1 && !(temp_ratio > 1.0))
    throw std::invalid_argument("temp_ratio must be > 1 when more than one replica is used");
  if (exchange_every < 1) throw std::invalid_argument("exchange_every must be >= 1");
  if (total_iters < 1) throw std::invalid_argument("total_iters must be >= 1");
  if (burn_in < 0 || burn_in >= total_iters)
    throw std::invalid_argument("burn_in must satisfy 0 <= burn_in < total_iters");
  if (pg_trunc < 1) throw std::invalid_argument("pg_trunc must be >= 1");
  if (!(prior_var > 0.0)) throw std::invalid_argument("prior_var must be > 0");
  if (prior_mean_beta.size() != 0 && prior_mean_beta.size() != d)
    throw std::invalid_argument("prior_mean_beta has the wrong length");
  if (prior_mean_gamma.size() != 0 && prior_mean_gamma.size() != p)
    throw std::invalid_argument("prior_mean_gamma has the wrong length");
  if (prior_cov_beta.size() != 0 && (prior_cov_beta.rows() != d || prior_cov_beta.cols() != d))
    throw std::invalid_argument("prior_cov_beta has the wrong shape");
  if (prior_cov_gamma.size() != 0 &&
      (prior_cov_gamma.rows() != p || prior_cov_gamma.cols() != p))
    throw std::invalid_argument("prior_cov_gamma has the wrong shape");
}

double SamplerConfig::temperature(int m) const { return std::pow(temp_ratio, m); }

GaussianPrior GaussianPrior::make(const Vector& mean, const Matrix& cov, double var, int dim) {
  GaussianPrior g;
  g.mean = mean.size() ? mean : Vector::Zero(dim);
  if (cov.size()) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("prior covariance is not positive definite");
    g.precision = llt.solve(Matrix::Identity(dim, dim));
  } else {
    g.precision = Matrix::Identity(dim, dim) / var;
  }
  g.precision_mean = g.precision * g.mean;
  return g;
}

ParamPair PosteriorDraws::at(int row) const {
  return {draws.row(row).head(d).transpose(), draws.row(row).tail(p).transpose()};
}

double h_probability(double eta_gamma, double eta_beta, double temperature) {
  return inv_logit((eta_gamma - softplus(eta_beta)) / temperature);
}

void update_h(ReplicaState& s, const Dataset& data) {
  const Vector eta_b = data.X * s.beta;
  const Vector eta_g = data.zmat() * s.gamma;
  s.h.resize(static_cast<std::size_t>(data.n()));
  for (int i = 0; i < data.n(); ++i) {
    if (data.y[i] == 1.0) {
      s.h[i] = 1;
      continue;
    }
    const double mu = h_probability(eta_g[i], eta_b[i], s.temperature);
    s.h[i] = uniform01(s.rng) < mu ? 1 : 0;
  }
}

Vector draw_gaussian_precision(const Matrix& precision, const Vector& rhs, Rng& rng) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("conditional precision is not positive definite");
  const Vector mean = llt.solve(rhs);
  std::normal_distribution<double> normal;
  Vector eps(precision.rows());
  for (Eigen::Index j = 0; j < eps.size(); ++j) eps[j] = normal(rng);
  return mean + llt.matrixU().solve(eps);
}

void update_gamma(ReplicaState& s, const Dataset& data, const GaussianPrior& prior,
                  int pg_trunc) {
  const Matrix& Z = data.zmat();
  const double b = 1.0 / s.temperature;
  const Vector eta = Z * s.gamma;
  Vector w(data.n());
  Vector kappa(data.n());
  for (int i = 0; i < data.n(); ++i) {
    w[i] = sample_pg(b, eta[i], pg_trunc, s.rng);
    kappa[i] = (s.h[i] - 0.5) / s.temperature;
  }
  const Matrix precision = Z.transpose() * w.asDiagonal() * Z + prior.precision;
  const Vector rhs = Z.transpose() * kappa + prior.precision_mean;
  s.gamma = draw_gaussian_precision(precision, rhs, s.rng);
}

void update_beta(ReplicaState& s, const Dataset& data, const GaussianPrior& prior,
                 int pg_trunc) {
  std::vector<int> rows;
  rows.reserve(s.h.size());
  for (int i = 0; i < data.n(); ++i) {
    if (s.h[i] == 1) rows.push_back(i);
  }
  const double b = 1.0 / s.temperature;
  const Matrix Xh = data.X(rows, Eigen::all);
  const Vector eta = Xh * s.beta;
  const auto m = static_cast<Eigen::Index>(rows.size());
  Vector w(m);
  Vector kappa(m);
  for (Eigen::Index k = 0; k < m; ++k) {
    w[k] = sample_pg(b, eta[k], pg_trunc, s.rng);
    kappa[k] = (data.y[rows[k]] - 0.5) / s.temperature;
  }
  const Matrix precision = Xh.transpose() * w.asDiagonal() * Xh + prior.precision;
  const Vector rhs = Xh.transpose() * kappa + prior.precision_mean;
  s.beta = draw_gaussian_precision(precision, rhs, s.rng);
}

double complete_loglik(const Dataset& data, const ReplicaState& s) {
  const Vector eta_b = data.X * s.beta;
  const Vector eta_g = data.zmat() * s.gamma;
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    if (s.h[i] == 1) {
      total += log_inv_logit(eta_g[i]);
      total += data.y[i] == 1.0 ? log_inv_logit(eta_b[i]) : log1m_inv_logit(eta_b[i]);
    } else {
      total += log1m_inv_logit(eta_g[i]);
    }
  }
  return total;
}

double swap_log_acceptance(double t_lo, double t_hi, double ll_lo, double ll_hi) {
  return std::min(0.0, (1.0 / t_lo - 1.0 / t_hi) * (ll_hi - ll_lo));
}

bool attempt_swap(ReplicaState& lo, ReplicaState& hi, const Dataset& data, Rng& rng) {
  const double log_alpha = swap_log_acceptance(lo.temperature, hi.temperature,
                                               complete_loglik(data, lo),
                                               complete_loglik(data, hi));
  if (std::log(uniform01(rng)) >= log_alpha) return false;
  std::swap(lo.beta, hi.beta);
  std::swap(lo.gamma, hi.gamma);
  std::swap(lo.h, hi.h);
  return true;
}

std::vector<ReplicaState> initial_replicas(const Dataset& data, const SamplerConfig& cfg) {
  std::vector<ReplicaState> states(static_cast<std::size_t>(cfg.n_replicas));
  for (int m = 0; m < cfg.n_replicas; ++m) {
    ReplicaState& s = states[m];
    s.rng = make_stream(cfg.seed, static_cast<std::uint64_t>(m) + 1);
    s.temperature = cfg.temperature(m);
    std::normal_distribution<double> normal;
    s.beta.resize(data.d());
    s.gamma.resize(data.p());
    for (int j = 0; j < data.d(); ++j) s.beta[j] = cfg.init_sd * normal(s.rng);
    for (int j = 0; j < data.p(); ++j) s.gamma[j] = cfg.init_sd * normal(s.rng);
    s.h.resize(static_cast<std::size_t>(data.n()));
    for (int i = 0; i < data.n(); ++i)
      s.h[i] = data.y[i] == 1.0 || uniform01(s.rng) < 0.5 ? 1 : 0;
  }
  return states;
}

PosteriorDraws run_sampler(const Dataset& data, const SamplerConfig& cfg,
                           const RunControl& control) {
  cfg.validate(data.d(), data.p());
  const int d = data.d();
  const int p = data.p();
  const int M = cfg.n_replicas;
  const GaussianPrior prior_beta =
      GaussianPrior::make(cfg.prior_mean_beta, cfg.prior_cov_beta, cfg.prior_var, d);
  const GaussianPrior prior_gamma =
      GaussianPrior::make(cfg.prior_mean_gamma, cfg.prior_cov_gamma, cfg.prior_var, p);
  const std::uint64_t hash = config_hash(data, cfg);

  SamplerSnapshot snap;
  if (!control.resume_from.empty()) {
    snap = read_checkpoint(control.resume_from, hash, data);
  } else {
    snap.states = initial_replicas(data, cfg);
    snap.swap_rng = make_stream(cfg.seed, 0);
    snap.swap_attempts.assign(static_cast<std::size_t>(std::max(M - 1, 0)), 0);
    snap.swap_accepts.assign(static_cast<std::size_t>(std::max(M - 1, 0)), 0);
    snap.draws = Matrix::Zero(cfg.total_iters - cfg.burn_in, d + p);
    snap.loglik = Vector::Zero(cfg.total_iters - cfg.burn_in);
  }

  auto finish = [&](int kept_rows) {
    PosteriorDraws out;
    out.d = d;
    out.p = p;
    out.draws = snap.draws.topRows(kept_rows);
    out.loglik_trace = snap.loglik.head(kept_rows);
    out.swap_attempts = snap.swap_attempts;
    out.swap_accepts = snap.swap_accepts;
    for (std::size_t k = 0; k < snap.swap_attempts.size(); ++k) {
      out.swap_accept_rate.push_back(
          snap.swap_attempts[k] ? static_cast<double>(snap.swap_accepts[k]) /
                                      static_cast<double>(snap.swap_attempts[k])
                                : 0.0);
    }
    return out;
  };

  for (int iter = snap.completed + 1; iter <= cfg.total_iters; ++iter) {
    parallel_for(snap.states.size(), cfg.threads, [&](std::size_t m) {
      ReplicaState& s = snap.states[m];
      update_h(s, data);
      update_gamma(s, data, prior_gamma, cfg.pg_trunc);
      update_beta(s, data, prior_beta, cfg.pg_trunc);
    });
    if (M > 1 && iter % cfg.exchange_every == 0) {
      const int round = iter / cfg.exchange_every;
      for (int m = (round - 1) % 2; m + 1 < M; m += 2) {
        ++snap.swap_attempts[m];
        if (attempt_swap(snap.states[m], snap.states[m + 1], data, snap.swap_rng))
          ++snap.swap_accepts[m];
      }
    }
    if (iter > cfg.burn_in) {
      const int row = iter - cfg.burn_in - 1;
      const ReplicaState& cold = snap.states[0];
      snap.draws.row(row).head(d) = cold.beta.transpose();
      snap.draws.row(row).tail(p) = cold.gamma.transpose();
      snap.loglik[row] = loglik(data, {cold.beta, cold.gamma});
    }
    snap.completed = iter;
    const bool stop = control.stop_after > 0 && iter == control.stop_after;
    if (!control.checkpoint_path.empty() &&
        ((control.checkpoint_every > 0 && iter % control.checkpoint_every == 0) || stop))
      write_checkpoint(control.checkpoint_path, hash, data, snap);
    if (control.progress) control.progress(iter);
    if (stop) return finish(std::max(iter - cfg.burn_in, 0));
  }
  return finish(cfg.total_iters - cfg.burn_in);
}

}  // namespace zilr
