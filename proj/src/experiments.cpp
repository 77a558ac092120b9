#include "zilr/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zilr/parallel.hpp"
#include "zilr/rng.hpp"

namespace zilr {

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

constexpr std::uint64_t kGenerateStream = 0x5eed0001;

}  // namespace

void Scenario::validate() const {
  if (n < 1) throw std::invalid_argument("scenario n must be >= 1");
  if (reps < 1) throw std::invalid_argument("scenario reps must be >= 1");
  if (beta_true.size() != static_cast<Eigen::Index>(covariates.size()) ||
      gamma_true.size() != beta_true.size())
    throw std::invalid_argument("scenario dimensions are inconsistent");
  if (covariates.empty() || covariates.front() != CovariateKind::Intercept)
    throw std::invalid_argument("scenario covariates must start with the intercept");
}

Scenario scenario_preset(std::string_view name) {
  using K = CovariateKind;
  Scenario s;
  s.name = std::string(name);
  s.beta_true = vec({0.5, 1.0, 0.5, 0.5, 0.25});
  double g0 = 0.0;
  if (name == "VeryLow") g0 = 4.3;
  else if (name == "Low") g0 = 3.0;
  else if (name == "Moderate") g0 = 1.7;
  else if (name == "High") g0 = 1.0;
  if (g0 != 0.0) {
    s.gamma_true = vec({g0, -1.0, -1.0, 0.5, 0.5});
    s.n = 1000;
    s.covariates = {K::Intercept, K::StandardNormal, K::StandardNormal, K::StandardNormal,
                    K::StandardNormal};
    return s;
  }
  s.gamma_true = vec({1.7, -1.0, -1.0, 0.5, 0.5});
  s.n = 2000;
  s.reps = 1;
  if (name == "S1")
    s.covariates = {K::Intercept, K::StandardNormal, K::StandardNormal, K::StandardNormal,
                    K::StandardNormal};
  else if (name == "S2")
    s.covariates = {K::Intercept, K::Bernoulli, K::Bernoulli, K::Bernoulli, K::Bernoulli};
  else if (name == "S3")
    s.covariates = {K::Intercept, K::StandardNormal, K::StandardNormal, K::Bernoulli,
                    K::Bernoulli};
  else
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
  return s;
}

std::vector<std::string> scenario_names() {
  return {"VeryLow", "Low", "Moderate", "High", "S1", "S2", "S3"};
}

namespace {

template <typename Row>
void draw_covariates(const Scenario& s, Rng& rng, Row&& row) {
  std::normal_distribution<double> normal;
  for (std::size_t j = 0; j < s.covariates.size(); ++j) {
    switch (s.covariates[j]) {
      case CovariateKind::Intercept: row[j] = 1.0; break;
      case CovariateKind::StandardNormal: row[j] = normal(rng); break;
      case CovariateKind::Bernoulli: row[j] = uniform01(rng) < 0.5 ? 1.0 : 0.0; break;
    }
  }
}

}  // namespace

GeneratedData generate(const Scenario& s, int rep) {
  s.validate();
  Rng rng = make_stream(derive_seed(s.seed, kGenerateStream), static_cast<std::uint64_t>(rep));
  const int d = static_cast<int>(s.covariates.size());
  GeneratedData g;
  g.data.X.resize(s.n, d);
  g.data.y.resize(s.n);
  g.y_star.resize(s.n);
  g.h.resize(static_cast<std::size_t>(s.n));
  for (int i = 0; i < s.n; ++i) {
    draw_covariates(s, rng, g.data.X.row(i));
    const double pg = inv_logit(g.data.X.row(i).dot(s.gamma_true));
    const double pb = inv_logit(g.data.X.row(i).dot(s.beta_true));
    g.h[i] = uniform01(rng) < pg ? 1 : 0;
    g.y_star[i] = uniform01(rng) < pb ? 1.0 : 0.0;
    g.data.y[i] = g.h[i] * g.y_star[i];
  }
  g.data.column_names = {"intercept"};
  for (int j = 1; j < d; ++j) g.data.column_names.push_back("x" + std::to_string(j));
  return g;
}

double structural_zero_fraction(const Scenario& s, int samples, std::uint64_t seed) {
  s.validate();
  Rng rng = make_stream(seed, 0);
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(s.covariates.size()));
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    draw_covariates(s, rng, row);
    total += inv_logit(-row.dot(s.gamma_true));
  }
  return total / samples;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Proposed: return "Proposed";
    case Method::StandardLR: return "StandardLR";
    case Method::NaiveZILR: return "NaiveZILR";
  }
  return "unknown";
}

const MethodSummary& SimSummary::get(Method m) const {
  for (const MethodSummary& s : methods)
    if (s.method == m) return s;
  throw std::out_of_range("method not present in summary");
}

MethodSummary summarize(const std::vector<RepResult>& reps, Method method, const Scenario& s) {
  MethodSummary out;
  out.method = method;
  const bool lr = method == Method::StandardLR;
  const Vector truth = lr ? s.beta_true : ParamPair{s.beta_true, s.gamma_true}.stacked();
  std::vector<Vector> errors;
  for (const RepResult& r : reps) {
    ++out.total;
    if (!r.error.empty()) {
      ++out.failed;
      continue;
    }
    const OptimStatus status = lr ? r.lr_status : r.zilr_status;
    if (status == OptimStatus::Converged) ++out.optimizer_converged;
    bool ok = false;
    Vector est;
    switch (method) {
      case Method::StandardLR: ok = r.lr_reasonable; est = r.lr_beta; break;
      case Method::NaiveZILR: ok = r.naive_reasonable; est = r.naive.stacked(); break;
      case Method::Proposed: ok = r.proposed_reasonable; est = r.proposed.stacked(); break;
    }
    if (!ok) {
      ++out.unreasonable;
      continue;
    }
    ++out.reasonable;
    errors.push_back(est - truth);
  }
  const auto k = truth.size();
  out.bias = Vector::Constant(k, std::nan(""));
  out.sd = Vector::Constant(k, std::nan(""));
  if (!errors.empty()) {
    out.bias.setZero();
    for (const Vector& e : errors) out.bias += e;
    out.bias /= static_cast<double>(errors.size());
    if (errors.size() > 1) {
      Vector ss = Vector::Zero(k);
      for (const Vector& e : errors) ss += (e - out.bias).cwiseAbs2();
      out.sd = (ss / static_cast<double>(errors.size() - 1)).cwiseSqrt();
    }
  }
  return out;
}

SimSummary run_simulation(const Scenario& scenario, const SimulationOptions& opts) {
  scenario.validate();
  SimSummary out;
  out.scenario = scenario;
  out.reps.resize(static_cast<std::size_t>(scenario.reps));
  const ParamPair truth{scenario.beta_true, scenario.gamma_true};
  parallel_for(out.reps.size(), opts.threads, [&](std::size_t r) {
    RepResult& res = out.reps[r];
    res.rep = static_cast<int>(r);
    try {
      const GeneratedData g = generate(scenario, res.rep);
      FitConfig cfg = opts.fit;
      cfg.seed = derive_seed(scenario.seed, 0x0f170000ULL + r);
      const FitResult lr = fit_logistic(g.data, cfg);
      res.lr_beta = lr.params.beta;
      res.lr_status = lr.status;
      res.lr_reasonable = screen_reasonable(lr.params.beta, scenario.beta_true);
      const FitResult zi = fit_zilr(g.data, cfg);
      res.zilr_status = zi.status;
      res.naive = zi.params;
      res.naive_reasonable = screen_reasonable(zi.params, truth);
      const RelabelResult rl = relabel(zi.params, lr.params.beta);
      res.proposed = rl.params;
      res.chosen = rl.chosen;
      res.proposed_reasonable = screen_reasonable(rl.params, truth);
    } catch (const std::exception& e) {
      res.error = e.what();
    }
  });
  for (Method m : {Method::Proposed, Method::StandardLR, Method::NaiveZILR})
    out.methods.push_back(summarize(out.reps, m, scenario));
  return out;
}

SamplerConfig bimodality_sampler_config(bool full_scale, std::uint64_t seed) {
  SamplerConfig cfg;
  cfg.seed = seed;
  if (!full_scale) {
    cfg.n_replicas = 5;
    cfg.total_iters = 6000;
    cfg.burn_in = 1000;
    cfg.pg_trunc = 20;
  }
  return cfg;
}

BimodalityResult run_bimodality(const Scenario& scenario, const SamplerConfig& cfg,
                                const RunControl& control, const KMeansOptions& km) {
  BimodalityResult out;
  out.scenario = scenario;
  out.data = generate(scenario, 0).data;
  out.draws = run_sampler(out.data, cfg, control);
  const int d = out.draws.d;
  out.clusters = kmeans2(out.draws.draws, km);
  out.pca = pca2(out.draws.draws);
  out.swap_gap = swap_gap(out.clusters.centroids, d);
  out.centroid_distance = centroid_distance(out.clusters.centroids);
  out.swap_property = !out.clusters.degenerate && out.swap_gap < out.centroid_distance;
  out.canonical_draws = canonicalize_draws(out.draws.draws, d);
  out.canonical_mean = out.canonical_draws.colwise().mean().transpose();
  out.canonical_clusters = kmeans2(out.canonical_draws, km);
  out.canonical_centroid_distance = centroid_distance(out.canonical_clusters.centroids);
  out.verdict = out.swap_property ? "two clusters related by exchanging beta and gamma"
                                  : "clusters not clearly distinguished";
  return out;
}

void SignFlipConfig::validate() const {
  if (!(a > 0.0)) throw std::invalid_argument("sign flip: a must be > 0");
  if (c_grid.empty()) throw std::invalid_argument("sign flip: empty c grid");
  for (double c : c_grid)
    if (!(c <= 0.0)) throw std::invalid_argument("sign flip: grid values must be <= 0");
  if (mc_samples < 2) throw std::invalid_argument("sign flip: need at least 2 MC samples");
}

SignFlipResult run_signflip(const SignFlipConfig& cfg) {
  cfg.validate();
  const int N = cfg.mc_samples;
  Rng rng = make_stream(cfg.seed, 0);
  std::normal_distribution<double> normal;
  Vector x(N);
  for (int i = 0; i < N; ++i) x[i] = normal(rng);

  SignFlipResult out;
  for (double c : cfg.c_grid) {
    Vector pi(N);
    for (int i = 0; i < N; ++i)
      pi[i] = inv_logit(cfg.gamma0 + c * x[i]) * inv_logit(cfg.beta0 + cfg.a * x[i]);
    // Mean negative expected log-likelihood of the misspecified logistic model.
    const Objective f = [&](const Vector& th, Vector& g) {
      double val = 0.0;
      double g0 = 0.0, g1 = 0.0;
      for (int i = 0; i < N; ++i) {
        const double eta = th[0] + th[1] * x[i];
        val -= pi[i] * log_inv_logit(eta) + (1.0 - pi[i]) * log1m_inv_logit(eta);
        const double r = pi[i] - inv_logit(eta);
        g0 -= r;
        g1 -= r * x[i];
      }
      g.resize(2);
      g << g0 / N, g1 / N;
      return val / N;
    };
    const OptimResult r = minimize(f, Vector::Zero(2), cfg.optimizer);
    SignFlipRow row;
    row.c = c;
    row.theta0 = r.x[0];
    row.t_star = r.x[1];
    row.converged = r.converged();
    row.status = std::string(to_string(r.status));
    const Vector px = pi.cwiseProduct(x);
    row.f_hat = px.mean();
    row.f_se = std::sqrt((px.array() - row.f_hat).square().sum() / (N - 1) / N);
    out.rows.push_back(row);
  }

  std::vector<SignFlipRow> asc = out.rows;
  std::sort(asc.begin(), asc.end(), [](const auto& l, const auto& r) { return l.c < r.c; });
  out.f_monotone = true;
  out.t_monotone = true;
  for (std::size_t k = 1; k < asc.size(); ++k) {
    if (asc[k].f_hat < asc[k - 1].f_hat - 2.0 * std::max(asc[k].f_se, asc[k - 1].f_se))
      out.f_monotone = false;
    if (asc[k].t_star < asc[k - 1].t_star - 1e-6) out.t_monotone = false;
    if (!out.sign_change && asc[k - 1].t_star < 0.0 && asc[k].t_star > 0.0)
      out.sign_change = std::make_pair(asc[k - 1].c, asc[k].c);
  }
  return out;
}

}  // namespace zilr
