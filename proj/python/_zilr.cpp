#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "zilr/experiments.hpp"
#include "zilr/fit.hpp"
#include "zilr/gibbs.hpp"
#include "zilr/io.hpp"
#include "zilr/polya_gamma.hpp"
#include "zilr/posterior.hpp"
#include "zilr/separation.hpp"

namespace py = pybind11;
using namespace zilr;

namespace {

Dataset make_dataset(const Matrix& X, const Vector& y, const std::optional<Matrix>& Z) {
  Dataset d;
  d.X = X;
  d.y = y;
  d.Z = Z;
  return d;
}

py::dict fit_dict(const FitResult& f) {
  py::dict out;
  out["beta"] = f.params.beta;
  out["gamma"] = f.params.gamma;
  out["loglik"] = f.loglik;
  out["converged"] = f.converged;
  out["iterations"] = f.iterations;
  out["grad_norm"] = f.grad_norm;
  out["status"] = std::string(to_string(f.status));
  out["initial_loglik"] = f.initial_loglik;
  return out;
}

FitConfig fit_config(int max_iters, double grad_tol, double init_sd, std::uint64_t seed,
                     bool full_memory) {
  FitConfig c;
  c.max_iters = max_iters;
  c.grad_tol = grad_tol;
  c.init_sd = init_sd;
  c.seed = seed;
  c.full_memory = full_memory;
  return c;
}

py::dict certificate_dict(const SeparationCertificate& c) {
  py::dict out;
  out["status"] = std::string(to_string(c.status));
  out["v"] = c.v;
  out["w"] = c.w;
  out["margin"] = c.margin;
  out["objective"] = c.objective;
  out["note"] = c.note;
  return out;
}

}  // namespace

PYBIND11_MODULE(_zilr, m) {
  m.doc() = "Zero-inflated logistic regression core";

  m.def("inv_logit", &inv_logit);
  m.def(
      "loglik",
      [](const Matrix& X, const Vector& y, const Vector& beta, const Vector& gamma,
         const std::optional<Matrix>& Z) { return loglik(make_dataset(X, y, Z), {beta, gamma}); },
      py::arg("X"), py::arg("y"), py::arg("beta"), py::arg("gamma"), py::arg("Z") = py::none());
  m.def(
      "grad_loglik",
      [](const Matrix& X, const Vector& y, const Vector& beta, const Vector& gamma,
         const std::optional<Matrix>& Z) {
        const Gradient g = grad_loglik(make_dataset(X, y, Z), {beta, gamma});
        return py::make_tuple(g.beta, g.gamma);
      },
      py::arg("X"), py::arg("y"), py::arg("beta"), py::arg("gamma"), py::arg("Z") = py::none());

  m.def(
      "fit_zilr",
      [](const Matrix& X, const Vector& y, const std::optional<Matrix>& Z, int max_iters,
         double grad_tol, double init_sd, std::uint64_t seed, bool full_memory) {
        const Dataset d = make_dataset(X, y, Z);
        py::gil_scoped_release release;
        const FitResult f = fit_zilr(d, fit_config(max_iters, grad_tol, init_sd, seed, full_memory));
        py::gil_scoped_acquire acquire;
        return fit_dict(f);
      },
      py::arg("X"), py::arg("y"), py::arg("Z") = py::none(), py::arg("max_iters") = 1000,
      py::arg("grad_tol") = 1e-6, py::arg("init_sd") = 0.1, py::arg("seed") = 0,
      py::arg("full_memory") = false);
  m.def(
      "fit_logistic",
      [](const Matrix& X, const Vector& y, int max_iters, double grad_tol, std::uint64_t seed) {
        const Dataset d = make_dataset(X, y, std::nullopt);
        return fit_dict(fit_logistic(d, fit_config(max_iters, grad_tol, 0.1, seed, false)));
      },
      py::arg("X"), py::arg("y"), py::arg("max_iters") = 1000, py::arg("grad_tol") = 1e-6,
      py::arg("seed") = 0);

  m.def(
      "relabel",
      [](const Vector& beta, const Vector& gamma, const Vector& beta_lr) {
        const RelabelResult r = relabel({beta, gamma}, beta_lr);
        py::dict out;
        out["beta"] = r.params.beta;
        out["gamma"] = r.params.gamma;
        out["swapped"] = r.chosen == Orientation::Swapped;
        out["sq_dist_original"] = r.sq_dist_original;
        out["sq_dist_swapped"] = r.sq_dist_swapped;
        return out;
      },
      py::arg("beta"), py::arg("gamma"), py::arg("beta_lr"));
  m.def(
      "canonicalize",
      [](const Vector& beta, const Vector& gamma) {
        const EquivClass c = canonicalize({beta, gamma});
        return py::make_tuple(c.canonical.beta, c.canonical.gamma, c.swapped);
      },
      py::arg("beta"), py::arg("gamma"));
  m.def(
      "screen_reasonable",
      [](const Vector& estimate, const Vector& truth) { return screen_reasonable(estimate, truth); },
      py::arg("estimate"), py::arg("truth"));

  m.def(
      "detect_double_separation",
      [](const Matrix& X, const Vector& y, const std::optional<Matrix>& Z) {
        return certificate_dict(detect_double_separation(make_dataset(X, y, Z)));
      },
      py::arg("X"), py::arg("y"), py::arg("Z") = py::none());
  m.def(
      "estimate_margin",
      [](const Matrix& X, const Vector& y, const std::optional<Matrix>& Z, int restarts,
         std::uint64_t seed) {
        MarginOptions o;
        o.restarts = restarts;
        o.seed = seed;
        return certificate_dict(estimate_margin(make_dataset(X, y, Z), o));
      },
      py::arg("X"), py::arg("y"), py::arg("Z") = py::none(), py::arg("restarts") = 64,
      py::arg("seed") = 0);

  m.def("pg_mean", &pg_mean, py::arg("b"), py::arg("c"));
  m.def(
      "sample_pg",
      [](double b, double c, int size, int trunc, std::uint64_t seed) {
        Rng rng = make_stream(seed, 0);
        Vector out(size);
        for (int i = 0; i < size; ++i) out[i] = sample_pg(b, c, trunc, rng);
        return out;
      },
      py::arg("b"), py::arg("c"), py::arg("size"), py::arg("trunc") = 200, py::arg("seed") = 0);

  m.def(
      "run_sampler",
      [](const Matrix& X, const Vector& y, const std::optional<Matrix>& Z, int replicas,
         double temp_ratio, int exchange_every, int iters, int burn_in, double prior_var,
         int pg_trunc, std::uint64_t seed, int threads) {
        const Dataset d = make_dataset(X, y, Z);
        SamplerConfig c;
        c.n_replicas = replicas;
        c.temp_ratio = temp_ratio;
        c.exchange_every = exchange_every;
        c.total_iters = iters;
        c.burn_in = burn_in;
        c.prior_var = prior_var;
        c.pg_trunc = pg_trunc;
        c.seed = seed;
        c.threads = threads;
        PosteriorDraws p;
        {
          py::gil_scoped_release release;
          p = run_sampler(d, c);
        }
        py::dict out;
        out["draws"] = p.draws;
        out["loglik"] = p.loglik_trace;
        out["d"] = p.d;
        out["p"] = p.p;
        out["swap_accept_rate"] = p.swap_accept_rate;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("Z") = py::none(), py::arg("replicas") = 20,
      py::arg("temp_ratio") = 1.05, py::arg("exchange_every") = 50, py::arg("iters") = 53000,
      py::arg("burn_in") = 3000, py::arg("prior_var") = 100.0, py::arg("pg_trunc") = 200,
      py::arg("seed") = 0, py::arg("threads") = 1);

  m.def(
      "kmeans2",
      [](const Matrix& points, int restarts, std::uint64_t seed) {
        KMeansOptions o;
        o.restarts = restarts;
        o.seed = seed;
        const ClusterReport r = kmeans2(points, o);
        py::dict out;
        out["assignments"] = r.assignments;
        out["centroids"] = r.centroids;
        out["proportions"] = r.proportions;
        out["inertia"] = r.inertia;
        out["degenerate"] = r.degenerate;
        return out;
      },
      py::arg("points"), py::arg("restarts") = 10, py::arg("seed") = 0);
  m.def(
      "pca2",
      [](const Matrix& points) {
        const PcaProjection p = pca2(points);
        py::dict out;
        out["components"] = p.components;
        out["scores"] = p.scores;
        out["explained_variance"] = p.explained_variance;
        return out;
      },
      py::arg("points"));

  m.def(
      "generate",
      [](const std::string& scenario, int rep, std::uint64_t seed, int n) {
        Scenario s = scenario_preset(scenario);
        s.seed = seed;
        if (n > 0) s.n = n;
        const GeneratedData g = generate(s, rep);
        return py::make_tuple(g.data.X, g.data.y, g.h);
      },
      py::arg("scenario"), py::arg("rep") = 0, py::arg("seed") = 20240601, py::arg("n") = 0);
  m.def(
      "structural_zero_fraction",
      [](const std::string& scenario, int samples, std::uint64_t seed) {
        return structural_zero_fraction(scenario_preset(scenario), samples, seed);
      },
      py::arg("scenario"), py::arg("samples") = 100000, py::arg("seed") = 0);
  m.def(
      "run_signflip",
      [](double a, double beta0, double gamma0, std::vector<double> grid, int samples,
         std::uint64_t seed) {
        SignFlipConfig c;
        c.a = a;
        c.beta0 = beta0;
        c.gamma0 = gamma0;
        if (!grid.empty()) c.c_grid = std::move(grid);
        c.mc_samples = samples;
        c.seed = seed;
        const SignFlipResult r = run_signflip(c);
        py::list rows;
        for (const SignFlipRow& row : r.rows) {
          py::dict d;
          d["c"] = row.c;
          d["t_star"] = row.t_star;
          d["theta0"] = row.theta0;
          d["f_hat"] = row.f_hat;
          d["f_se"] = row.f_se;
          d["converged"] = row.converged;
          rows.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        out["sign_change"] = r.sign_change;
        out["f_monotone"] = r.f_monotone;
        out["t_monotone"] = r.t_monotone;
        return out;
      },
      py::arg("a") = 1.0, py::arg("beta0") = 0.0, py::arg("gamma0") = 0.0,
      py::arg("grid") = std::vector<double>{}, py::arg("samples") = 200000, py::arg("seed") = 7);

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& outcome,
         const std::vector<std::string>& covariates, const std::vector<std::string>& standardize,
         bool complete_case) {
        io::CsvBindings b;
        b.outcome = outcome;
        b.complete_case = complete_case;
        for (const std::string& c : covariates) {
          bool s = false;
          for (const std::string& t : standardize) s |= t == c;
          b.covariates.push_back({c, s, {}});
        }
        io::LoadReport rep;
        const Dataset d = io::load_csv(path, b, &rep);
        return py::make_tuple(d.X, d.y, rep.rows_read, rep.rows_kept);
      },
      py::arg("path"), py::arg("outcome"), py::arg("covariates"),
      py::arg("standardize") = std::vector<std::string>{}, py::arg("complete_case") = true);

  m.attr("__version__") = io::kToolVersion;
}
