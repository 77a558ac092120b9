#include "zilr/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "zilr/parallel.hpp"
#include "zilr/rng.hpp"
#include "zilr/svg.hpp"

namespace zilr {

namespace {

struct LloydRun {
  Matrix centroids;
  std::vector<int> labels;  // 0 or 1
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  int iterations = 0;
};

double assign(const Matrix& pts, const Matrix& c, std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const double d0 = (pts.row(i) - c.row(0)).squaredNorm();
    const double d1 = (pts.row(i) - c.row(1)).squaredNorm();
    labels[i] = d1 < d0 ? 1 : 0;
    total += std::min(d0, d1);
  }
  return total;
}

// k-means++ seeding followed by Lloyd iterations.
LloydRun lloyd(const Matrix& pts, int max_iters, Rng rng) {
  const Eigen::Index n = pts.rows();
  LloydRun run;
  run.centroids.resize(2, pts.cols());
  const auto first = static_cast<Eigen::Index>(uniform01(rng) * static_cast<double>(n));
  run.centroids.row(0) = pts.row(std::min(first, n - 1));
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (pts.row(i) - run.centroids.row(0)).squaredNorm();
  const double total = d2.sum();
  Eigen::Index second = 0;
  double target = uniform01(rng) * total;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d2[i] <= 0.0) continue;
    second = i;
    target -= d2[i];
    if (target <= 0.0) break;
  }
  run.centroids.row(1) = pts.row(second);

  run.labels.assign(static_cast<std::size_t>(n), 0);
  std::vector<int> prev;
  for (run.iterations = 1; run.iterations <= max_iters; ++run.iterations) {
    run.inertia = assign(pts, run.centroids, run.labels);
    run.history.push_back(run.inertia);
    if (run.labels == prev) break;
    prev = run.labels;
    Matrix sums = Matrix::Zero(2, pts.cols());
    std::array<int, 2> counts{0, 0};
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(run.labels[i]) += pts.row(i);
      ++counts[run.labels[i]];
    }
    for (int k = 0; k < 2; ++k) {
      if (counts[k] > 0) run.centroids.row(k) = sums.row(k) / counts[k];
    }
  }
  run.iterations = std::min(run.iterations, max_iters);
  return run;
}

}  // namespace

ClusterReport kmeans2(const Matrix& points, const KMeansOptions& opts) {
  if (points.rows() < 2) throw std::invalid_argument("kmeans2 needs at least two points");
  if (opts.restarts < 1 || opts.max_iters < 1)
    throw std::invalid_argument("kmeans2: restarts and max_iters must be >= 1");
  ClusterReport rep;
  const Eigen::Index n = points.rows();

  bool identical = true;
  for (Eigen::Index i = 1; i < n && identical; ++i) identical = points.row(i) == points.row(0);
  if (identical) {
    rep.degenerate = true;
    rep.assignments.assign(static_cast<std::size_t>(n), 1);
    rep.centroids.resize(2, points.cols());
    rep.centroids.row(0) = points.row(0);
    rep.centroids.row(1) = points.row(0);
    rep.sizes = {static_cast<int>(n), 0};
    rep.proportions = {1.0, 0.0};
    return rep;
  }

  std::vector<LloydRun> runs(static_cast<std::size_t>(opts.restarts));
  parallel_for(runs.size(), opts.threads, [&](std::size_t r) {
    runs[r] = lloyd(points, opts.max_iters, make_stream(opts.seed, r));
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  LloydRun& run = runs[best];

  // Cluster 1 is the one with the smaller first centroid coordinate.
  const bool flip = run.centroids(1, 0) < run.centroids(0, 0);
  rep.centroids.resize(2, points.cols());
  rep.centroids.row(0) = run.centroids.row(flip ? 1 : 0);
  rep.centroids.row(1) = run.centroids.row(flip ? 0 : 1);
  rep.assignments.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = flip ? 1 - run.labels[i] : run.labels[i];
    rep.assignments[i] = k + 1;
    ++rep.sizes[k];
  }
  for (int k = 0; k < 2; ++k) rep.proportions[k] = static_cast<double>(rep.sizes[k]) / n;
  rep.inertia = run.inertia;
  rep.inertia_history = std::move(run.history);
  rep.iterations = run.iterations;
  rep.degenerate = rep.sizes[1] == 0 || rep.sizes[0] == 0;
  return rep;
}

PcaProjection pca2(const Matrix& points) {
  if (points.rows() < 2) throw std::invalid_argument("pca2 needs at least two points");
  PcaProjection out;
  out.mean = points.colwise().mean().transpose();
  const Matrix centered = points.rowwise() - out.mean.transpose();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(points.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Eigen::Index k = cov.rows();
  const double scale = std::max(eig.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = k - 1; j >= 0 && static_cast<int>(keep.size()) < 2; --j) {
    if (eig.eigenvalues()[j] > 1e-12 * scale) keep.push_back(j);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  out.components.resize(m, k);
  out.explained_variance.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    Vector v = eig.eigenvectors().col(keep[r]);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    out.components.row(r) = v.transpose();
    out.explained_variance[r] = eig.eigenvalues()[keep[r]];
  }
  out.scores = centered * out.components.transpose();
  return out;
}

double swap_gap(const Matrix& c, int d) {
  const Eigen::Index p = c.cols() - d;
  return (c.row(0).head(d) - c.row(1).tail(p)).norm() +
         (c.row(0).tail(p) - c.row(1).head(d)).norm();
}

double centroid_distance(const Matrix& c) { return (c.row(0) - c.row(1)).norm(); }

Matrix canonicalize_draws(const Matrix& draws, int d) {
  Matrix out(draws.rows(), draws.cols());
  for (Eigen::Index i = 0; i < draws.rows(); ++i)
    out.row(i) = canonicalize(ParamPair::from_stacked(draws.row(i).transpose(), d))
                     .canonical.stacked()
                     .transpose();
  return out;
}

Histogram histogram(const Eigen::Ref<const Vector>& values, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  if (values.size() == 0) throw std::invalid_argument("histogram of an empty sample");
  double lo = values.minCoeff();
  double hi = values.maxCoeff();
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.edges = Vector::LinSpaced(bins + 1, lo, hi);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    auto k = static_cast<int>(std::floor((values[i] - lo) / width));
    k = std::clamp(k, 0, bins - 1);
    // Guard against rounding at the edges.
    while (k > 0 && values[i] < h.edges[k]) --k;
    while (k < bins - 1 && values[i] >= h.edges[k + 1]) ++k;
    ++h.counts[k];
  }
  return h;
}

std::vector<std::string> parameter_names(int d, int p) {
  std::vector<std::string> names;
  for (int j = 0; j < d; ++j) names.push_back("beta_" + std::to_string(j));
  for (int j = 0; j < p; ++j) names.push_back("gamma_" + std::to_string(j));
  return names;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::vector<std::filesystem::path> export_traces(const PosteriorDraws& draws,
                                                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> files;
  const auto names = parameter_names(draws.d, draws.p);
  for (int j = 0; j < static_cast<int>(names.size()); ++j) {
    const Vector col = draws.draws.col(j);
    const auto trace_csv = out_dir / ("trace_" + names[j] + ".csv");
    {
      std::ofstream out = open_out(trace_csv);
      out << "iteration,value\n";
      for (Eigen::Index i = 0; i < col.size(); ++i) out << i << ',' << col[i] << '\n';
      if (!out) throw std::runtime_error("failed writing " + trace_csv.string());
    }
    files.push_back(trace_csv);

    const Histogram h = histogram(col);
    const auto hist_csv = out_dir / ("hist_" + names[j] + ".csv");
    {
      std::ofstream out = open_out(hist_csv);
      out << "bin_lower,bin_upper,count\n";
      for (std::size_t k = 0; k < h.counts.size(); ++k)
        out << h.edges[k] << ',' << h.edges[k + 1] << ',' << h.counts[k] << '\n';
      if (!out) throw std::runtime_error("failed writing " + hist_csv.string());
    }
    files.push_back(hist_csv);

    svg::Series s;
    s.x.resize(static_cast<std::size_t>(col.size()));
    s.y.assign(col.data(), col.data() + col.size());
    for (std::size_t i = 0; i < s.x.size(); ++i) s.x[i] = static_cast<double>(i);
    const auto trace_svg = out_dir / ("trace_" + names[j] + ".svg");
    write_text(trace_svg, svg::line_chart({s}, names[j], "iteration", names[j]));
    files.push_back(trace_svg);
    const auto hist_svg = out_dir / ("hist_" + names[j] + ".svg");
    write_text(hist_svg, svg::histogram(h.edges, h.counts, names[j]));
    files.push_back(hist_svg);
  }
  return files;
}

}  // namespace zilr
