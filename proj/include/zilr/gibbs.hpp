#pragma once

// Polya-Gamma Gibbs sampler for the zero-inflated logistic model, run on a
// geometric temperature ladder T_m = r^m (m = 0..M-1) with replica exchange.
// Replica m targets
//   pi_T(beta, gamma, h) ∝ { prod_i p(y_i, h_i | beta, gamma) }^(1/T) * prior,
// only the likelihood is tempered.  Draws are retained from the T = 1 slot.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "zilr/model.hpp"
#include "zilr/rng.hpp"

namespace zilr {

struct SamplerConfig {
  int n_replicas = 20;
  double temp_ratio = 1.05;
  int exchange_every = 50;
  int total_iters = 53000;
  int burn_in = 3000;
  // Gaussian priors.  Empty vectors/matrices mean zero mean and
  // prior_var * I covariance.
  Vector prior_mean_beta;
  Vector prior_mean_gamma;
  Matrix prior_cov_beta;
  Matrix prior_cov_gamma;
  double prior_var = 100.0;
  int pg_trunc = 200;
  std::uint64_t seed = 0;
  double init_sd = 0.1;  // beta, gamma start ~ N(0, init_sd^2 I)
  int threads = 1;

  void validate(int d, int p) const;
  [[nodiscard]] double temperature(int m) const;
};

struct GaussianPrior {
  Vector mean;
  Matrix precision;
  Vector precision_mean;  // precision * mean

  static GaussianPrior make(const Vector& mean, const Matrix& cov, double var, int dim);
};

struct ReplicaState {
  Vector beta;
  Vector gamma;
  std::vector<std::uint8_t> h;  // h[i] = 1 whenever y[i] = 1
  double temperature = 1.0;
  Rng rng;
};

struct PosteriorDraws {
  int d = 0;
  int p = 0;
  Matrix draws;         // kept_iters x (d + p), columns beta || gamma
  Vector loglik_trace;  // observed-data log-likelihood of each kept draw
  std::vector<double> swap_accept_rate;  // per adjacent pair (m, m+1)
  std::vector<std::int64_t> swap_attempts;
  std::vector<std::int64_t> swap_accepts;

  [[nodiscard]] int kept() const { return static_cast<int>(draws.rows()); }
  [[nodiscard]] ParamPair at(int row) const;
};

// --- single Gibbs steps ------------------------------------------------------

/// Tempered success probability for h_i when y_i = 0:
///   F((z_i'gamma - log(1 + exp(x_i'beta))) / T).
double h_probability(double eta_gamma, double eta_beta, double temperature);

void update_h(ReplicaState& s, const Dataset& data);
void update_gamma(ReplicaState& s, const Dataset& data, const GaussianPrior& prior, int pg_trunc);
void update_beta(ReplicaState& s, const Dataset& data, const GaussianPrior& prior, int pg_trunc);

/// Draw from N(P^-1 r, P^-1) given the precision P and r, via P = L L'.
Vector draw_gaussian_precision(const Matrix& precision, const Vector& rhs, Rng& rng);

/// log prod_i p(y_i, h_i | beta, gamma)
double complete_loglik(const Dataset& data, const ReplicaState& s);

/// log alpha = min{0, (1/T_lo - 1/T_hi) (log L(hi) - log L(lo))}
double swap_log_acceptance(double t_lo, double t_hi, double ll_lo, double ll_hi);

/// Proposes exchanging the (beta, gamma, h) of two adjacent replicas.
/// Temperatures and RNG streams stay with their slots.
bool attempt_swap(ReplicaState& lo, ReplicaState& hi, const Dataset& data, Rng& rng);

// --- full run -----------------------------------------------------------------

struct RunControl {
  std::filesystem::path checkpoint_path;  // empty: no checkpoints
  int checkpoint_every = 0;               // iterations between checkpoints
  std::filesystem::path resume_from;      // empty: fresh start
  int stop_after = 0;                     // > 0: stop (with checkpoint) at this iteration
  std::function<void(int iter)> progress;
};

/// Initial replica states: beta, gamma ~ N(0, init_sd^2 I), h = y OR Bernoulli(1/2).
std::vector<ReplicaState> initial_replicas(const Dataset& data, const SamplerConfig& cfg);

PosteriorDraws run_sampler(const Dataset& data, const SamplerConfig& cfg,
                           const RunControl& control = {});

/// Stable digest binding a checkpoint to its configuration and data.
std::uint64_t config_hash(const Dataset& data, const SamplerConfig& cfg);

}  // namespace zilr
