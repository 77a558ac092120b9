#pragma once

// Report and table emitters shared by the CLI and the bindings.  Every writer
// returns the paths it produced.

#include <filesystem>
#include <string>
#include <vector>

#include "zilr/experiments.hpp"
#include "zilr/fit.hpp"
#include "zilr/gibbs.hpp"
#include "zilr/io.hpp"
#include "zilr/posterior.hpp"

namespace zilr::io {

using Paths = std::vector<std::filesystem::path>;

/// fit.csv (one row) and fit_report.txt.
Paths write_fit(const std::filesystem::path& dir, const std::string& model, const FitResult& fit,
                const std::vector<std::string>& column_names);

/// Header beta_0..beta_{d-1},gamma_0..gamma_{p-1},loglik.
void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws);
PosteriorDraws read_draws_csv(const std::filesystem::path& path);

/// Reads "beta_j = v" / "gamma_j = v" lines; other keys are ignored.
ParamPair read_params(const KeyValues& kv, const std::string& prefix = "");

KeyValues swap_report(const PosteriorDraws& draws, const SamplerConfig& cfg);

/// clusters.csv, pca_scores.csv, pca.svg, cluster_report.txt.
Paths write_analysis(const std::filesystem::path& dir, const PosteriorDraws& draws,
                     const ClusterReport& clusters, const PcaProjection& pca);

/// bias_table.csv, reasonable_table.csv, estimates.csv and one box plot per
/// coefficient.
Paths write_simulation(const std::filesystem::path& dir, const std::vector<SimSummary>& runs);

Paths write_bimodality(const std::filesystem::path& dir, const BimodalityResult& result);

Paths write_signflip(const std::filesystem::path& dir, const SignFlipResult& result);

}  // namespace zilr::io
