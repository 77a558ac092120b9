#include "zilr/reports.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "zilr/svg.hpp"

namespace zilr::io {

namespace fs = std::filesystem;

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out;
}

std::string vec_text(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? " " : "") + format_double(v[i]);
  return out;
}

std::string csv_or_blank(const Vector& v, Eigen::Index j) {
  return j < v.size() && std::isfinite(v[j]) ? format_double(v[j]) : "";
}

const char* color_of(int k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  return colors[k % 4];
}

}  // namespace

Paths write_fit(const fs::path& dir, const std::string& model, const FitResult& fit,
                const std::vector<std::string>& column_names) {
  const int d = static_cast<int>(fit.params.beta.size());
  const int p = static_cast<int>(fit.params.gamma.size());
  std::ostringstream csv;
  csv << "model,status,converged,iterations,loglik,grad_norm";
  for (const std::string& name : parameter_names(d, p)) csv << ',' << name;
  csv << '\n'
      << model << ',' << to_string(fit.status) << ',' << (fit.converged ? 1 : 0) << ','
      << fit.iterations << ',' << format_double(fit.loglik) << ',' << format_double(fit.grad_norm);
  for (int j = 0; j < d; ++j) csv << ',' << format_double(fit.params.beta[j]);
  for (int j = 0; j < p; ++j) csv << ',' << format_double(fit.params.gamma[j]);
  csv << '\n';

  KeyValues kv{{"model", model},
               {"status", std::string(to_string(fit.status))},
               {"converged", fit.converged ? "true" : "false"},
               {"iterations", std::to_string(fit.iterations)},
               {"loglik", format_double(fit.loglik)},
               {"initial_loglik", format_double(fit.initial_loglik)},
               {"grad_norm", format_double(fit.grad_norm)},
               {"columns", join_names(column_names)}};
  for (int j = 0; j < d; ++j) kv.emplace_back("beta_" + std::to_string(j), format_double(fit.params.beta[j]));
  for (int j = 0; j < p; ++j) kv.emplace_back("gamma_" + std::to_string(j), format_double(fit.params.gamma[j]));
  if (!fit.message.empty()) kv.emplace_back("message", fit.message);

  const fs::path a = dir / "fit.csv";
  const fs::path b = dir / "fit_report.txt";
  write_text(a, csv.str());
  write_key_values(b, kv);
  return {a, b};
}

void write_draws_csv(const fs::path& path, const PosteriorDraws& draws) {
  std::ostringstream out;
  out << join_names(parameter_names(draws.d, draws.p)) << ",loglik\n";
  for (int i = 0; i < draws.kept(); ++i) {
    for (Eigen::Index j = 0; j < draws.draws.cols(); ++j) out << format_double(draws.draws(i, j)) << ',';
    out << format_double(draws.loglik_trace[i]) << '\n';
  }
  write_text(path, out.str());
}

PosteriorDraws read_draws_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header row");
  const std::vector<std::string> header = split_csv_line(line);
  PosteriorDraws out;
  for (const std::string& h : header) {
    if (h.rfind("beta_", 0) == 0) ++out.d;
    else if (h.rfind("gamma_", 0) == 0) ++out.p;
  }
  const auto cols = static_cast<std::size_t>(out.d + out.p);
  if (out.d == 0 || out.p == 0 || header.size() < cols)
    throw std::runtime_error(path.string() + ": header must list beta_j then gamma_j columns");
  const bool has_ll = header.size() > cols && header[cols] == "loglik";
  std::vector<std::vector<double>> rows;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) + " is short");
    std::vector<double> v;
    for (std::size_t j = 0; j < cols + (has_ll ? 1 : 0); ++j) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(cells[j], &used));
        if (used != cells[j].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ": row " + std::to_string(row) + ", column '" +
                                 header[j] + "': non-numeric value '" + cells[j] + "'");
      }
    }
    rows.push_back(std::move(v));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.draws.resize(n, static_cast<Eigen::Index>(cols));
  out.loglik_trace = Vector::Constant(n, std::nan(""));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out.draws(i, static_cast<Eigen::Index>(j)) = rows[i][j];
    if (has_ll) out.loglik_trace[i] = rows[i][cols];
  }
  return out;
}

ParamPair read_params(const KeyValues& kv, const std::string& prefix) {
  std::map<int, double> beta;
  std::map<int, double> gamma;
  for (const auto& [k, v] : kv) {
    if (k.rfind(prefix, 0) != 0) continue;
    const std::string key = k.substr(prefix.size());
    std::map<int, double>* target = nullptr;
    std::string idx;
    if (key.rfind("beta_", 0) == 0) {
      target = &beta;
      idx = key.substr(5);
    } else if (key.rfind("gamma_", 0) == 0) {
      target = &gamma;
      idx = key.substr(6);
    } else {
      continue;
    }
    try {
      (*target)[std::stoi(idx)] = std::stod(v);
    } catch (const std::exception&) {
      throw std::invalid_argument("parameter '" + k + "' has a malformed index or value");
    }
  }
  auto to_vec = [](const std::map<int, double>& m, const std::string& what) {
    Vector out(static_cast<Eigen::Index>(m.size()));
    int expect = 0;
    for (const auto& [i, v] : m) {
      if (i != expect) throw std::invalid_argument(what + "_" + std::to_string(expect) + " is missing");
      out[expect++] = v;
    }
    return out;
  };
  return {to_vec(beta, prefix + "beta"), to_vec(gamma, prefix + "gamma")};
}

KeyValues swap_report(const PosteriorDraws& draws, const SamplerConfig& cfg) {
  KeyValues kv{{"replicas", std::to_string(cfg.n_replicas)},
               {"temp_ratio", format_double(cfg.temp_ratio)},
               {"exchange_every", std::to_string(cfg.exchange_every)},
               {"total_iters", std::to_string(cfg.total_iters)},
               {"burn_in", std::to_string(cfg.burn_in)},
               {"kept", std::to_string(draws.kept())},
               {"seed", std::to_string(cfg.seed)}};
  for (std::size_t k = 0; k < draws.swap_accept_rate.size(); ++k) {
    const std::string pair = std::to_string(k) + "_" + std::to_string(k + 1);
    kv.emplace_back("swap_attempts_" + pair, std::to_string(draws.swap_attempts[k]));
    kv.emplace_back("swap_accepts_" + pair, std::to_string(draws.swap_accepts[k]));
    kv.emplace_back("swap_rate_" + pair, format_double(draws.swap_accept_rate[k]));
  }
  return kv;
}

Paths write_analysis(const fs::path& dir, const PosteriorDraws& draws,
                     const ClusterReport& clusters, const PcaProjection& pca) {
  const std::vector<std::string> names = parameter_names(draws.d, draws.p);
  Paths out;

  std::ostringstream cl;
  cl << "cluster,size,proportion," << join_names(names) << '\n';
  for (int k = 0; k < 2; ++k) {
    cl << k + 1 << ',' << clusters.sizes[k] << ',' << format_double(clusters.proportions[k]);
    for (Eigen::Index j = 0; j < clusters.centroids.cols(); ++j)
      cl << ',' << format_double(clusters.centroids(k, j));
    cl << '\n';
  }
  out.push_back(dir / "clusters.csv");
  write_text(out.back(), cl.str());

  std::ostringstream sc;
  sc << "iteration,cluster,pc1,pc2\n";
  std::vector<svg::Series> series(2);
  for (int k = 0; k < 2; ++k) {
    series[k].color = color_of(k);
    series[k].label = "cluster " + std::to_string(k + 1);
  }
  for (Eigen::Index i = 0; i < pca.scores.rows(); ++i) {
    const double s1 = pca.scores(i, 0);
    const double s2 = pca.scores.cols() > 1 ? pca.scores(i, 1) : 0.0;
    const int c = clusters.assignments[static_cast<std::size_t>(i)];
    sc << i + 1 << ',' << c << ',' << format_double(s1) << ',' << format_double(s2) << '\n';
    series[c - 1].x.push_back(s1);
    series[c - 1].y.push_back(s2);
  }
  out.push_back(dir / "pca_scores.csv");
  write_text(out.back(), sc.str());
  out.push_back(dir / "pca.svg");
  write_text(out.back(), svg::scatter(series, "posterior draws, first two principal components",
                                      "PC1", "PC2"));

  KeyValues kv{{"kept", std::to_string(draws.kept())},
               {"cluster1_size", std::to_string(clusters.sizes[0])},
               {"cluster2_size", std::to_string(clusters.sizes[1])},
               {"cluster1_proportion", format_double(clusters.proportions[0])},
               {"cluster2_proportion", format_double(clusters.proportions[1])},
               {"inertia", format_double(clusters.inertia)},
               {"degenerate", clusters.degenerate ? "true" : "false"},
               {"explained_variance", vec_text(pca.explained_variance)}};
  if (draws.d == draws.p) {
    kv.emplace_back("swap_gap", format_double(swap_gap(clusters.centroids, draws.d)));
    kv.emplace_back("centroid_distance", format_double(centroid_distance(clusters.centroids)));
  }
  out.push_back(dir / "cluster_report.txt");
  write_key_values(out.back(), kv);
  return out;
}

Paths write_simulation(const fs::path& dir, const std::vector<SimSummary>& runs) {
  Paths out;
  const Method methods[] = {Method::Proposed, Method::StandardLR, Method::NaiveZILR};

  std::ostringstream bias;
  std::ostringstream rate;
  rate << "scenario,method,reasonable,unreasonable,failed,total,ratio,optimizer_converged\n";
  std::ostringstream est;
  est << "scenario,method,rep,parameter,estimate\n";
  bool header_done = false;
  for (const SimSummary& run : runs) {
    const int d = static_cast<int>(run.scenario.beta_true.size());
    const std::vector<std::string> names = parameter_names(d, d);
    if (!header_done) {
      bias << "scenario,method,statistic," << join_names(names) << '\n';
      header_done = true;
    }
    for (Method m : methods) {
      const MethodSummary& s = run.get(m);
      for (const char* stat : {"bias", "sd"}) {
        const Vector& v = std::string(stat) == "bias" ? s.bias : s.sd;
        bias << run.scenario.name << ',' << to_string(m) << ',' << stat;
        for (Eigen::Index j = 0; j < 2 * d; ++j) bias << ',' << csv_or_blank(v, j);
        bias << '\n';
      }
      rate << run.scenario.name << ',' << to_string(m) << ',' << s.reasonable << ','
           << s.unreasonable << ',' << s.failed << ',' << s.total << ','
           << format_double(s.ratio()) << ',' << s.optimizer_converged << '\n';
    }
    for (const RepResult& r : run.reps) {
      if (!r.error.empty()) continue;
      for (Method m : methods) {
        const Vector v = m == Method::StandardLR ? r.lr_beta
                         : m == Method::Proposed ? r.proposed.stacked()
                                                 : r.naive.stacked();
        for (Eigen::Index j = 0; j < v.size(); ++j)
          est << run.scenario.name << ',' << to_string(m) << ',' << r.rep << ',' << names[j] << ','
              << format_double(v[j]) << '\n';
      }
    }
    // Box plots of reasonable beta estimates, one per coefficient.
    for (int j = 0; j < d; ++j) {
      std::vector<std::vector<double>> groups(3);
      std::vector<std::string> labels;
      for (int k = 0; k < 3; ++k) {
        labels.emplace_back(to_string(methods[k]));
        for (const RepResult& r : run.reps) {
          if (!r.error.empty()) continue;
          if (methods[k] == Method::StandardLR && r.lr_reasonable) groups[k].push_back(r.lr_beta[j]);
          if (methods[k] == Method::Proposed && r.proposed_reasonable)
            groups[k].push_back(r.proposed.beta[j]);
          if (methods[k] == Method::NaiveZILR && r.naive_reasonable)
            groups[k].push_back(r.naive.beta[j]);
        }
      }
      const double truth = run.scenario.beta_true[j];
      out.push_back(dir / ("boxplot_" + run.scenario.name + "_beta_" + std::to_string(j) + ".svg"));
      write_text(out.back(), svg::boxplots(groups, labels,
                                           run.scenario.name + ": beta_" + std::to_string(j),
                                           &truth));
    }
  }
  out.push_back(dir / "bias_table.csv");
  write_text(out.back(), bias.str());
  out.push_back(dir / "reasonable_table.csv");
  write_text(out.back(), rate.str());
  out.push_back(dir / "estimates.csv");
  write_text(out.back(), est.str());
  return out;
}

Paths write_bimodality(const fs::path& dir, const BimodalityResult& r) {
  Paths out = write_analysis(dir, r.draws, r.clusters, r.pca);
  out.push_back(dir / "draws.csv");
  write_draws_csv(out.back(), r.draws);

  const int d = r.draws.d;
  const std::vector<std::string> names = parameter_names(d, r.draws.p);
  const Vector truth = canonicalize({r.scenario.beta_true, r.scenario.gamma_true}).canonical.stacked();
  std::ostringstream cm;
  cm << "parameter,canonical_mean,canonical_truth\n";
  for (Eigen::Index j = 0; j < r.canonical_mean.size(); ++j)
    cm << names[j] << ',' << format_double(r.canonical_mean[j]) << ',' << format_double(truth[j])
       << '\n';
  out.push_back(dir / "canonical_means.csv");
  write_text(out.back(), cm.str());

  KeyValues kv{{"scenario", r.scenario.name},
               {"n", std::to_string(r.data.n())},
               {"swap_gap", format_double(r.swap_gap)},
               {"centroid_distance", format_double(r.centroid_distance)},
               {"swap_property", r.swap_property ? "true" : "false"},
               {"canonical_centroid_distance", format_double(r.canonical_centroid_distance)},
               {"cluster1_proportion", format_double(r.clusters.proportions[0])},
               {"cluster2_proportion", format_double(r.clusters.proportions[1])},
               {"verdict", r.verdict}};
  for (std::size_t k = 0; k < r.draws.swap_accept_rate.size(); ++k)
    kv.emplace_back("swap_rate_" + std::to_string(k) + "_" + std::to_string(k + 1),
                    format_double(r.draws.swap_accept_rate[k]));
  out.push_back(dir / "bimodality_report.txt");
  write_key_values(out.back(), kv);
  return out;
}

Paths write_signflip(const fs::path& dir, const SignFlipResult& r) {
  std::ostringstream csv;
  csv << "c,theta0,t_star,f_hat,f_se,converged,status\n";
  svg::Series t;
  t.label = "t*";
  for (const SignFlipRow& row : r.rows) {
    csv << format_double(row.c) << ',' << format_double(row.theta0) << ','
        << format_double(row.t_star) << ',' << format_double(row.f_hat) << ','
        << format_double(row.f_se) << ',' << (row.converged ? 1 : 0) << ',' << row.status << '\n';
  }
  std::vector<SignFlipRow> asc = r.rows;
  std::sort(asc.begin(), asc.end(), [](const auto& a, const auto& b) { return a.c < b.c; });
  for (const SignFlipRow& row : asc) {
    t.x.push_back(row.c);
    t.y.push_back(row.t_star);
  }
  Paths out{dir / "signflip.csv", dir / "signflip.svg", dir / "signflip_report.txt"};
  write_text(out[0], csv.str());
  write_text(out[1], svg::line_chart({t}, "pseudo-true slope of the logistic fit", "c", "t*"));
  KeyValues kv{{"f_monotone", r.f_monotone ? "true" : "false"},
               {"t_monotone", r.t_monotone ? "true" : "false"},
               {"sign_change",
                r.sign_change ? format_double(r.sign_change->first) + " " +
                                    format_double(r.sign_change->second)
                              : "none"}};
  write_key_values(out[2], kv);
  return out;
}

}  // namespace zilr::io
