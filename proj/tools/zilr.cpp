// zilr command-line entry point.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zilr/experiments.hpp"
#include "zilr/fit.hpp"
#include "zilr/gibbs.hpp"
#include "zilr/io.hpp"
#include "zilr/posterior.hpp"
#include "zilr/reports.hpp"
#include "zilr/separation.hpp"

namespace fs = std::filesystem;
using namespace zilr;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out;
  std::string config;
  std::uint64_t seed = 1;
};

struct DataOpts {
  std::string path;
  std::string outcome;
  std::vector<std::string> covariates;
  std::vector<std::string> standardize;
  std::vector<std::string> recodes;  // column=from:to,from:to
  bool keep_incomplete = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out,-o", c.out, "Run directory (default: $ZILR_OUTPUT_ROOT/<subcommand>)");
  sub->add_option("--config", c.config, "Flat key = value file; flags on the command line win");
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}

void add_data(CLI::App* sub, DataOpts& d) {
  sub->add_option("--data", d.path, "Input CSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--outcome", d.outcome, "Outcome column (0/1 after recoding)")->required();
  sub->add_option("--covariates", d.covariates, "Covariate columns")->delimiter(',')->required();
  sub->add_option("--standardize", d.standardize,
                  "Columns to standardize after filtering, or 'all'")
      ->delimiter(',');
  sub->add_option("--recode", d.recodes, "Value map, e.g. DIQ010=1:1,2:0 (repeatable)");
  sub->add_flag("--keep-incomplete", d.keep_incomplete,
                "Fail on missing cells instead of dropping the row");
}

io::CsvBindings bindings_of(const DataOpts& d) {
  io::CsvBindings b;
  b.outcome = d.outcome;
  b.complete_case = !d.keep_incomplete;
  std::map<std::string, std::map<double, double>> maps;
  for (const std::string& r : d.recodes) {
    const auto eq = r.find('=');
    if (eq == std::string::npos) throw UsageError("--recode expects column=from:to,...");
    maps[r.substr(0, eq)] = io::parse_recode(r.substr(eq + 1));
  }
  const bool all = d.standardize.size() == 1 && d.standardize[0] == "all";
  for (const std::string& s : d.standardize) {
    if (all) break;
    bool found = false;
    for (const std::string& c : d.covariates) found |= c == s;
    if (!found) throw UsageError("--standardize names '" + s + "', which is not a covariate");
  }
  if (maps.count(d.outcome)) b.outcome_recode = maps.at(d.outcome);
  for (const std::string& c : d.covariates) {
    io::ColumnBinding cb{c, all, {}};
    for (const std::string& s : d.standardize) cb.standardize |= s == c;
    if (maps.count(c)) cb.recode = maps.at(c);
    b.covariates.push_back(std::move(cb));
  }
  for (const auto& [col, m] : maps) {
    bool used = col == d.outcome;
    for (const std::string& c : d.covariates) used |= c == col;
    if (!used) throw UsageError("--recode names '" + col + "', which is not a bound column");
  }
  return b;
}

io::KeyValues load_report_kv(const io::LoadReport& r) {
  io::KeyValues kv{{"rows_read", std::to_string(r.rows_read)},
                   {"rows_kept", std::to_string(r.rows_kept)}};
  for (const auto& [c, n] : r.missing) kv.emplace_back("missing_" + c, std::to_string(n));
  for (const auto& [c, n] : r.out_of_map) kv.emplace_back("out_of_map_" + c, std::to_string(n));
  for (const auto& [c, ms] : r.standardization) {
    kv.emplace_back("mean_" + c, io::format_double(ms.first));
    kv.emplace_back("sd_" + c, io::format_double(ms.second));
  }
  return kv;
}

// Values given in --config fill options the command line left unset.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  for (const auto& [k, v] : io::read_key_values(path)) {
    if (k == "config") throw UsageError("config files cannot name another config file");
    CLI::Option* opt = sub->get_option_no_throw("--" + k);
    if (!opt) throw UsageError(path + ": unknown key '" + k + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    if (opt->get_items_expected_max() > 1 || opt->get_expected_max() > 1) {
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) opt->add_result(item);
    } else {
      opt->add_result(v);
    }
    opt->run_callback();
  }
}

std::map<std::string, std::string> echo_config(const CLI::App* sub) {
  std::map<std::string, std::string> out;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    out[name] = value;
  }
  return out;
}

struct Run {
  io::RunManifest manifest;

  Run(const std::string& sub, const Common& c, const CLI::App* app, std::vector<std::string> argv)
      : manifest(io::resolve_output_dir(c.out, sub), sub, std::move(argv), echo_config(app),
                 c.seed) {}

  fs::path dir() const { return manifest.dir(); }
  void add(const io::Paths& ps) {
    for (const fs::path& p : ps) manifest.add_output(p);
  }
  void add(const fs::path& p) { manifest.add_output(p); }
};

FitConfig fit_config(int max_iters, double grad_tol, double init_sd, bool full, std::uint64_t seed) {
  FitConfig f;
  f.max_iters = max_iters;
  f.grad_tol = grad_tol;
  f.init_sd = init_sd;
  f.full_memory = full;
  f.seed = seed;
  f.validate();
  return f;
}

void print_kv(const io::KeyValues& kv) {
  for (const auto& [k, v] : kv) std::cout << k << " = " << v << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Zero-inflated logistic regression: fitting, sampling and studies", "zilr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);

  Common common;
  DataOpts data_opts;

  // fit
  auto* fit = app.add_subcommand("fit", "Maximum likelihood fit of a CSV dataset");
  std::string fit_model = "both";
  int fit_iters = 1000;
  double fit_tol = 1e-6, fit_init = 0.1;
  bool fit_full = false;
  add_common(fit, common);
  add_data(fit, data_opts);
  fit->add_option("--model", fit_model, "zilr, logistic or both")
      ->check(CLI::IsMember({"zilr", "logistic", "both"}))
      ->capture_default_str();
  fit->add_option("--max-iters", fit_iters)->capture_default_str();
  fit->add_option("--grad-tol", fit_tol)->capture_default_str();
  fit->add_option("--init-sd", fit_init)->capture_default_str();
  fit->add_flag("--full-memory", fit_full, "Dense BFGS instead of L-BFGS");

  // sample
  auto* sample = app.add_subcommand("sample", "Tempered Gibbs sampler with replica exchange");
  SamplerConfig scfg;
  std::string checkpoint, resume;
  int checkpoint_every = 0, stop_after = 0;
  add_common(sample, common);
  add_data(sample, data_opts);
  sample->add_option("--replicas", scfg.n_replicas)->capture_default_str();
  sample->add_option("--temp-ratio", scfg.temp_ratio)->capture_default_str();
  sample->add_option("--exchange-every", scfg.exchange_every)->capture_default_str();
  sample->add_option("--iters", scfg.total_iters)->capture_default_str();
  sample->add_option("--burn-in", scfg.burn_in)->capture_default_str();
  sample->add_option("--prior-var", scfg.prior_var)->capture_default_str();
  sample->add_option("--pg-trunc", scfg.pg_trunc)->capture_default_str();
  sample->add_option("--init-sd", scfg.init_sd)->capture_default_str();
  sample->add_option("--threads", scfg.threads)->capture_default_str();
  sample->add_option("--checkpoint", checkpoint, "Checkpoint file");
  sample->add_option("--checkpoint-every", checkpoint_every)->capture_default_str();
  sample->add_option("--resume", resume, "Resume from a checkpoint")->check(CLI::ExistingFile);
  sample->add_option("--stop-after", stop_after, "Stop (and checkpoint) after this iteration");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Cluster, project and plot posterior draws");
  std::string draws_path;
  int restarts = 10;
  bool no_traces = false;
  add_common(analyze, common);
  analyze->add_option("--draws", draws_path, "draws.csv from sample")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--restarts", restarts, "k-means restarts")->capture_default_str();
  analyze->add_flag("--no-traces", no_traces, "Skip per-parameter traces and histograms");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Repeated-sampling comparison of the estimators");
  std::vector<std::string> sim_scenarios{"VeryLow", "Low", "Moderate", "High"};
  int sim_reps = 500, sim_n = 0, threads = 0;
  bool full_scale = false;
  add_common(simulate, common);
  simulate->add_option("--scenario", sim_scenarios, "Scenario names")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--reps", sim_reps)->capture_default_str();
  simulate->add_option("--n", sim_n, "Override the sample size");
  simulate->add_option("--threads", threads, "0 = all cores")->capture_default_str();
  simulate->add_flag("--full-scale", full_scale, "10000 replicates per scenario");

  // bimodality
  auto* bimodal = app.add_subcommand("bimodality", "Posterior bimodality study");
  std::string bm_scenario = "S1";
  int bm_replicas = 0, bm_iters = 0, bm_burn = 0, bm_trunc = 0, bm_n = 0;
  add_common(bimodal, common);
  bimodal->add_option("--scenario", bm_scenario)
      ->check(CLI::IsMember({"S1", "S2", "S3"}))
      ->capture_default_str();
  bimodal->add_option("--replicas", bm_replicas, "Override the replica count");
  bimodal->add_option("--iters", bm_iters, "Override the iteration count");
  bimodal->add_option("--burn-in", bm_burn, "Override the burn-in");
  bimodal->add_option("--pg-trunc", bm_trunc, "Override the Polya-Gamma series length");
  bimodal->add_option("--n", bm_n, "Override the sample size");
  bimodal->add_option("--threads", threads)->capture_default_str();
  bimodal->add_flag("--full-scale", full_scale, "20 replicas, 53000 iterations");

  // signflip
  auto* signflip = app.add_subcommand("signflip", "Pseudo-true slope of a misspecified logistic fit");
  SignFlipConfig sf;
  add_common(signflip, common);
  signflip->add_option("--a", sf.a)->capture_default_str();
  signflip->add_option("--beta0", sf.beta0)->capture_default_str();
  signflip->add_option("--gamma0", sf.gamma0)->capture_default_str();
  signflip->add_option("--grid", sf.c_grid, "Values of c (<= 0)")->delimiter(',');
  signflip->add_option("--samples", sf.mc_samples)->capture_default_str();

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Double separation and margin diagnostics");
  MarginOptions mopt;
  add_common(diagnose, common);
  add_data(diagnose, data_opts);
  diagnose->add_option("--restarts", mopt.restarts)->capture_default_str();
  diagnose->add_option("--margin-iters", mopt.iters)->capture_default_str();
  diagnose->add_option("--threads", mopt.threads)->capture_default_str();

  // relabel
  auto* relabel_cmd = app.add_subcommand("relabel", "Choose the labelling closest to the LR fit");
  std::string params_path;
  add_common(relabel_cmd, common);
  relabel_cmd
      ->add_option("--params", params_path,
                   "key = value file with beta_j, gamma_j and lr_beta_j entries")
      ->required()
      ->check(CLI::ExistingFile);

  if (argc > 1 && argv[1][0] != '-' && !app.get_subcommand_no_throw(argv[1])) {
    std::cerr << "zilr: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
    return 1;
  }
  try {
    app.parse(argc, argv);
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub, common.config);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (app.get_subcommands().empty()) std::cerr << '\n' << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "zilr: " << e.what() << '\n';
    return 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  std::optional<Run> run;
  try {
    run.emplace(name, common, sub, args);
    Run& r = *run;
    auto load = [&]() {
      const io::CsvBindings b = bindings_of(data_opts);
      io::LoadReport rep;
      Dataset d = io::load_csv(data_opts.path, b, &rep);
      r.manifest.add_input(data_opts.path);
      r.manifest.start();
      r.add(r.dir() / "data_report.txt");
      io::write_key_values(r.dir() / "data_report.txt", load_report_kv(rep));
      return d;
    };

    if (name == "fit") {
      const Dataset d = load();
      const FitConfig cfg = fit_config(fit_iters, fit_tol, fit_init, fit_full, common.seed);
      io::KeyValues summary;
      std::optional<FitResult> lr, zi;
      if (fit_model != "zilr") {
        lr = fit_logistic(d, cfg);
        r.add(io::write_fit(fit_model == "both" ? r.dir() / "logistic" : r.dir(), "logistic", *lr,
                            d.column_names));
        summary.emplace_back("logistic_status", std::string(to_string(lr->status)));
        summary.emplace_back("logistic_loglik", io::format_double(lr->loglik));
      }
      if (fit_model != "logistic") {
        zi = fit_zilr(d, cfg);
        r.add(io::write_fit(fit_model == "both" ? r.dir() / "zilr" : r.dir(), "zilr", *zi,
                            d.column_names));
        summary.emplace_back("zilr_status", std::string(to_string(zi->status)));
        summary.emplace_back("zilr_loglik", io::format_double(zi->loglik));
      }
      if (lr && zi) {
        const RelabelResult rl = relabel(zi->params, lr->params.beta);
        FitResult relabeled = *zi;
        relabeled.params = rl.params;
        r.add(io::write_fit(r.dir() / "relabeled", "zilr_relabeled", relabeled, d.column_names));
        summary.emplace_back("relabel_choice",
                             rl.chosen == Orientation::Original ? "original" : "swapped");
        summary.emplace_back("sq_dist_original", io::format_double(rl.sq_dist_original));
        summary.emplace_back("sq_dist_swapped", io::format_double(rl.sq_dist_swapped));
      }
      summary.emplace_back("n", std::to_string(d.n()));
      summary.emplace_back("seed", std::to_string(common.seed));
      r.add(r.dir() / "report.txt");
      io::write_key_values(r.dir() / "report.txt", summary);
      print_kv(summary);
    } else if (name == "sample") {
      const Dataset d = load();
      scfg.seed = common.seed;
      RunControl ctl;
      ctl.checkpoint_path = checkpoint;
      ctl.checkpoint_every = checkpoint_every;
      ctl.resume_from = resume;
      ctl.stop_after = stop_after;
      if (!resume.empty()) r.manifest.add_input(resume);
      const PosteriorDraws draws = run_sampler(d, scfg, ctl);
      if (!checkpoint.empty()) r.add(fs::path(checkpoint));
      r.add(r.dir() / "draws.csv");
      io::write_draws_csv(r.dir() / "draws.csv", draws);
      io::KeyValues kv = io::swap_report(draws, scfg);
      r.add(r.dir() / "swap_report.txt");
      io::write_key_values(r.dir() / "swap_report.txt", kv);
      print_kv(kv);
    } else if (name == "analyze") {
      r.manifest.add_input(draws_path);
      r.manifest.start();
      const PosteriorDraws draws = io::read_draws_csv(draws_path);
      KMeansOptions km;
      km.seed = common.seed;
      km.restarts = restarts;
      const ClusterReport cl = kmeans2(draws.draws, km);
      const PcaProjection pca = pca2(draws.draws);
      r.add(io::write_analysis(r.dir(), draws, cl, pca));
      if (!no_traces) r.add(export_traces(draws, r.dir() / "traces"));
      print_kv(io::read_key_values(r.dir() / "cluster_report.txt"));
    } else if (name == "simulate") {
      r.manifest.start();
      SimulationOptions so;
      so.threads = threads;
      std::vector<SimSummary> runs;
      for (const std::string& s : sim_scenarios) {
        Scenario sc = scenario_preset(s);
        sc.reps = full_scale ? 10000 : sim_reps;
        if (sim_n > 0) sc.n = sim_n;
        sc.seed = common.seed;
        std::cerr << "simulate: " << s << " (" << sc.reps << " reps)\n";
        runs.push_back(run_simulation(sc, so));
      }
      r.add(io::write_simulation(r.dir(), runs));
      std::ifstream t(r.dir() / "reasonable_table.csv");
      std::cout << t.rdbuf();
    } else if (name == "bimodality") {
      r.manifest.start();
      Scenario sc = scenario_preset(bm_scenario);
      sc.seed = common.seed;
      if (bm_n > 0) sc.n = bm_n;
      SamplerConfig cfg = bimodality_sampler_config(full_scale, common.seed);
      if (bm_replicas > 0) cfg.n_replicas = bm_replicas;
      if (bm_iters > 0) cfg.total_iters = bm_iters;
      if (bm_burn > 0) cfg.burn_in = bm_burn;
      if (bm_trunc > 0) cfg.pg_trunc = bm_trunc;
      cfg.threads = threads;
      KMeansOptions km;
      km.seed = common.seed;
      const BimodalityResult res = run_bimodality(sc, cfg, {}, km);
      r.add(io::write_bimodality(r.dir(), res));
      r.add(export_traces(res.draws, r.dir() / "traces"));
      print_kv(io::read_key_values(r.dir() / "bimodality_report.txt"));
    } else if (name == "signflip") {
      r.manifest.start();
      sf.seed = common.seed;
      const SignFlipResult res = run_signflip(sf);
      r.add(io::write_signflip(r.dir(), res));
      std::ifstream t(r.dir() / "signflip.csv");
      std::cout << t.rdbuf();
      print_kv(io::read_key_values(r.dir() / "signflip_report.txt"));
    } else if (name == "diagnose") {
      const Dataset d = load();
      mopt.seed = common.seed;
      const SeparationCertificate sep = detect_double_separation(d);
      const SeparationCertificate mar = estimate_margin(d, mopt);
      auto vec = [](const Vector& v) {
        std::string s;
        for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + io::format_double(v[i]);
        return s;
      };
      io::KeyValues kv{{"separation_status", std::string(to_string(sep.status))},
                       {"separation_objective", io::format_double(sep.objective)},
                       {"separation_v", vec(sep.v)},
                       {"separation_w", vec(sep.w)},
                       {"margin_status", std::string(to_string(mar.status))},
                       {"margin_estimate", io::format_double(mar.margin)},
                       {"margin_objective", io::format_double(mar.objective)},
                       {"margin_v", vec(mar.v)},
                       {"margin_w", vec(mar.w)}};
      if (!sep.note.empty()) kv.emplace_back("separation_note", sep.note);
      if (!mar.note.empty()) kv.emplace_back("margin_note", mar.note);
      r.add(r.dir() / "separation_report.txt");
      io::write_key_values(r.dir() / "separation_report.txt", kv);
      print_kv(kv);
    } else if (name == "relabel") {
      r.manifest.add_input(params_path);
      r.manifest.start();
      const io::KeyValues in = io::read_key_values(params_path);
      const ParamPair est = io::read_params(in);
      const Vector lr = io::read_params(in, "lr_").beta;
      const RelabelResult rl = relabel(est, lr);
      io::KeyValues kv{{"sq_dist_original", io::format_double(rl.sq_dist_original)},
                       {"sq_dist_swapped", io::format_double(rl.sq_dist_swapped)},
                       {"chosen", rl.chosen == Orientation::Original ? "original" : "swapped"}};
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.3f / %.3f", rl.sq_dist_original, rl.sq_dist_swapped);
      kv.emplace_back("norms", buf);
      for (Eigen::Index j = 0; j < rl.params.beta.size(); ++j)
        kv.emplace_back("beta_" + std::to_string(j), io::format_double(rl.params.beta[j]));
      for (Eigen::Index j = 0; j < rl.params.gamma.size(); ++j)
        kv.emplace_back("gamma_" + std::to_string(j), io::format_double(rl.params.gamma[j]));
      r.add(r.dir() / "relabel_report.txt");
      io::write_key_values(r.dir() / "relabel_report.txt", kv);
      print_kv(kv);
    }
    r.manifest.finalize("ok");
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "zilr " << name << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "zilr " << name << ": " << e.what() << '\n';
    if (run) {
      try {
        run->manifest.finalize(std::string("failed: ") + e.what());
      } catch (...) {
      }
    }
    return 2;
  }
}
