#pragma once

// Summaries of posterior draws: two-cluster k-means++, a two-component PCA,
// swap diagnostics for the exchange symmetry, and trace/histogram export.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "zilr/gibbs.hpp"
#include "zilr/model.hpp"

namespace zilr {

struct ClusterReport {
  std::vector<int> assignments;  // 1 or 2 per draw
  Matrix centroids;              // 2 x cols; cluster 1 has the smaller first coordinate
  std::array<int, 2> sizes{0, 0};
  std::array<double, 2> proportions{0.0, 0.0};
  double inertia = 0.0;                 // within-cluster sum of squares
  std::vector<double> inertia_history;  // per Lloyd iteration of the chosen restart
  int iterations = 0;
  bool degenerate = false;  // fewer than two distinct points; cluster 2 is empty
};

struct KMeansOptions {
  int restarts = 10;
  int max_iters = 100;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// k-means with k = 2, k-means++ seeding, best inertia over the restarts
/// (ties to the lowest restart index).  Requires at least two rows.
ClusterReport kmeans2(const Matrix& points, const KMeansOptions& opts = {});

struct PcaProjection {
  Matrix components;           // rows are unit loadings, at most 2
  Matrix scores;               // rows x components.rows()
  Vector explained_variance;   // non-increasing
  Vector mean;
};

/// Top two principal components of the centered sample covariance.  Each
/// loading is signed so its largest-magnitude entry is positive.  Components with
/// zero variance are dropped.
PcaProjection pca2(const Matrix& points);

/// ||beta_1 - gamma_2|| + ||gamma_1 - beta_2|| for the two centroids, split at d.
double swap_gap(const Matrix& centroids, int d);

/// ||c_1 - c_2||
double centroid_distance(const Matrix& centroids);

/// Every row mapped to its canonical (beta || gamma) representative.
Matrix canonicalize_draws(const Matrix& draws, int d);

struct Histogram {
  Vector edges;  // bins + 1 edges
  std::vector<int> counts;
};

/// Equal-width bins over [min, max] (or [min - 0.5, min + 0.5] when all values
/// coincide).  Bins are half-open [e_k, e_k+1) except the last, which is closed.
Histogram histogram(const Eigen::Ref<const Vector>& values, int bins = 50);

/// Default column names beta_0..beta_{d-1}, gamma_0..gamma_{p-1}.
std::vector<std::string> parameter_names(int d, int p);

/// Per parameter: trace_<name>.csv (iteration,value), hist_<name>.csv
/// (bin_lower,bin_upper,count) and SVG renderings of both.  Returns the files
/// written, in order.
std::vector<std::filesystem::path> export_traces(const PosteriorDraws& draws,
                                                 const std::filesystem::path& out_dir);

}  // namespace zilr
