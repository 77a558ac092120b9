#pragma once

// Data generators and drivers for the simulation study, the posterior
// bimodality runs and the misspecification sign-flip demonstration.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zilr/fit.hpp"
#include "zilr/gibbs.hpp"
#include "zilr/posterior.hpp"

namespace zilr {

enum class CovariateKind { Intercept, StandardNormal, Bernoulli };

struct Scenario {
  std::string name;
  Vector beta_true;
  Vector gamma_true;
  int n = 1000;
  std::vector<CovariateKind> covariates;  // one per column, intercept first
  int reps = 500;
  std::uint64_t seed = 20240601;

  void validate() const;
};

/// VeryLow, Low, Moderate, High (n = 1000, normal covariates, gamma intercept
/// 4.3 / 3.0 / 1.7 / 1.0) and S1, S2, S3 (n = 2000, gamma intercept 1.7, normal /
/// Bernoulli(0.5) / mixed covariates).
Scenario scenario_preset(std::string_view name);
std::vector<std::string> scenario_names();

struct GeneratedData {
  Dataset data;
  std::vector<std::uint8_t> h;  // latent non-structural-zero indicator
  Vector y_star;                // outcome before zero inflation
};

/// Covariates per the scenario, h ~ Bernoulli(F(gamma'x)), y* ~ Bernoulli(F(beta'x)),
/// y = h y*.  Replicate r draws from its own stream derived from (seed, r).
GeneratedData generate(const Scenario& scenario, int rep);

/// Monte Carlo estimate of E[1 - F(gamma'x)] over the scenario's covariates.
double structural_zero_fraction(const Scenario& scenario, int samples, std::uint64_t seed);

// --- simulation study -------------------------------------------------------

enum class Method { Proposed, StandardLR, NaiveZILR };
std::string_view to_string(Method m);

struct RepResult {
  int rep = 0;
  Vector lr_beta;
  ParamPair naive;
  ParamPair proposed;
  Orientation chosen = Orientation::Original;
  OptimStatus lr_status = OptimStatus::MaxIterations;
  OptimStatus zilr_status = OptimStatus::MaxIterations;
  bool lr_reasonable = false;
  bool naive_reasonable = false;
  bool proposed_reasonable = false;
  std::string error;  // non-empty when the replicate failed outright
};

struct MethodSummary {
  Method method = Method::Proposed;
  Vector bias;  // over reasonable replicates; beta then gamma (beta only for LR)
  Vector sd;
  int reasonable = 0;
  int unreasonable = 0;
  int failed = 0;
  int total = 0;
  int optimizer_converged = 0;
  [[nodiscard]] double ratio() const { return total ? static_cast<double>(reasonable) / total : 0.0; }
};

struct SimSummary {
  Scenario scenario;
  std::vector<MethodSummary> methods;  // Proposed, StandardLR, NaiveZILR
  std::vector<RepResult> reps;

  [[nodiscard]] const MethodSummary& get(Method m) const;
};

struct SimulationOptions {
  FitConfig fit;  // fit.seed is replaced per replicate
  int threads = 0;
};

SimSummary run_simulation(const Scenario& scenario, const SimulationOptions& opts = {});

/// Bias and SD over the replicates flagged reasonable for the given method.
MethodSummary summarize(const std::vector<RepResult>& reps, Method method, const Scenario& s);

// --- bimodality -------------------------------------------------------------

struct BimodalityResult {
  Scenario scenario;
  Dataset data;
  PosteriorDraws draws;
  ClusterReport clusters;
  PcaProjection pca;
  double swap_gap = 0.0;           // ||b1 - g2|| + ||g1 - b2||
  double centroid_distance = 0.0;  // ||c1 - c2||
  bool swap_property = false;      // swap_gap < centroid_distance
  Matrix canonical_draws;
  Vector canonical_mean;
  ClusterReport canonical_clusters;
  double canonical_centroid_distance = 0.0;
  std::string verdict;
};

/// Sampler defaults for a bimodality run; full_scale selects 20 replicas and
/// 53000 iterations, otherwise 5 replicas and 6000 iterations (1000 burn-in) with
/// a 20-term Polya-Gamma series.
SamplerConfig bimodality_sampler_config(bool full_scale, std::uint64_t seed);

BimodalityResult run_bimodality(const Scenario& scenario, const SamplerConfig& cfg,
                                const RunControl& control = {}, const KMeansOptions& km = {});

// --- sign flip ----------------------------------------------------------------

struct SignFlipConfig {
  double a = 1.0;  // true slope of the outcome component
  double beta0 = 0.0;
  double gamma0 = 0.0;
  std::vector<double> c_grid{0.0, -0.5, -1.0, -1.5, -2.0, -3.0, -4.0, -6.0, -8.0};
  int mc_samples = 200000;
  std::uint64_t seed = 7;
  OptimizerOptions optimizer = [] {
    OptimizerOptions o;
    o.grad_tol = 1e-10;
    return o;
  }();

  void validate() const;
};

struct SignFlipRow {
  double c = 0.0;
  double theta0 = 0.0;  // pseudo-true intercept
  double t_star = 0.0;  // pseudo-true slope
  double f_hat = 0.0;   // mean of pi_c(x) * x
  double f_se = 0.0;
  bool converged = false;
  std::string status;
};

struct SignFlipResult {
  std::vector<SignFlipRow> rows;  // in grid order
  /// Adjacent grid values (ascending c) between which t* changes sign.
  std::optional<std::pair<double, double>> sign_change;
  bool f_monotone = false;  // f_hat non-decreasing in c within 2 SE
  bool t_monotone = false;  // t* non-decreasing in c within 1e-6
};

/// Covariate x ~ N(0, 1) drawn once; for each c the expected response
/// pi_c(x) = F(gamma0 + c x) F(beta0 + a x) replaces y, and the weighted
/// logistic likelihood in (theta0, t) is maximized.
SignFlipResult run_signflip(const SignFlipConfig& cfg);

}  // namespace zilr
