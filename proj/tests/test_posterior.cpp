#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>

#include "support.hpp"
#include "zilr/posterior.hpp"

using namespace zilr;

namespace {

Matrix two_blobs(int n1, int n2, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0);
  std::normal_distribution<double> normal;
  Matrix m(n1 + n2, 3);
  for (int i = 0; i < n1 + n2; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = normal(rng) + (i < n1 ? 5.0 : -5.0);
  return m;
}

int count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("kmeans2 separates well-separated blobs") {
  const Matrix pts = two_blobs(300, 700, 61);
  const ClusterReport r = kmeans2(pts, {});
  CHECK_FALSE(r.degenerate);
  // Cluster 1 is the blob with the smaller first coordinate (the -5 blob).
  CHECK(r.sizes[0] == 700);
  CHECK(r.sizes[1] == 300);
  CHECK(r.proportions[0] + r.proportions[1] == doctest::Approx(1.0));
  for (int i = 0; i < 1000; ++i) CHECK(r.assignments[i] == (i < 300 ? 2 : 1));
  CHECK(r.centroids(0, 0) < r.centroids(1, 0));
  for (std::size_t k = 1; k < r.inertia_history.size(); ++k)
    CHECK(r.inertia_history[k] <= r.inertia_history[k - 1] + 1e-9);
}

TEST_CASE("kmeans2 is deterministic and thread-count independent") {
  const Matrix pts = two_blobs(50, 50, 62);
  KMeansOptions a;
  a.seed = 4;
  KMeansOptions b = a;
  b.threads = 3;
  const ClusterReport ra = kmeans2(pts, a);
  const ClusterReport rb = kmeans2(pts, b);
  CHECK(ra.assignments == rb.assignments);
  CHECK(ra.centroids == rb.centroids);
}

TEST_CASE("kmeans2 flags a repeated point") {
  const Matrix pts = Matrix::Constant(10, 4, 1.5);
  const ClusterReport r = kmeans2(pts, {});
  CHECK(r.degenerate);
  CHECK(r.sizes[0] + r.sizes[1] == 10);
  CHECK((r.sizes[0] == 0 || r.sizes[1] == 0));
  CHECK_THROWS(kmeans2(Matrix::Zero(1, 2), {}));
}

TEST_CASE("pca2 on isotropic draws has equal variances") {
  Rng rng = make_stream(63, 0);
  std::normal_distribution<double> normal;
  Matrix pts(20000, 4);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (int j = 0; j < 4; ++j) pts(i, j) = normal(rng);
  const PcaProjection p = pca2(pts);
  REQUIRE(p.explained_variance.size() == 2);
  CHECK(p.explained_variance[0] >= p.explained_variance[1]);
  CHECK(p.explained_variance[0] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(p.explained_variance[1] == doctest::Approx(1.0).epsilon(0.05));
  const Matrix gram = p.components * p.components.transpose();
  CHECK((gram - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("pca2 on collinear draws puts all variance in one component") {
  Rng rng = make_stream(64, 0);
  std::normal_distribution<double> normal;
  Vector dir(3);
  dir << 1.0, -2.0, 0.5;
  Matrix pts(500, 3);
  for (int i = 0; i < 500; ++i) pts.row(i) = normal(rng) * dir.transpose();
  const PcaProjection p = pca2(pts);
  CHECK(p.explained_variance.size() >= 1);
  const double total = p.explained_variance.sum();
  CHECK(p.explained_variance[0] / total >= 0.99);
  // Sign convention: the largest-magnitude loading is positive.
  Eigen::Index arg = 0;
  p.components.row(0).cwiseAbs().maxCoeff(&arg);
  CHECK(p.components(0, arg) > 0.0);
}

TEST_CASE("pca2 scores preserve in-plane distances") {
  Rng rng = make_stream(65, 0);
  std::normal_distribution<double> normal;
  Matrix pts(300, 4);
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 4; ++j) pts(i, j) = normal(rng) * (j + 1);
  const PcaProjection p = pca2(pts);
  const Matrix proj = p.components.transpose() * p.components;
  for (int k = 0; k < 100; ++k) {
    const int a = (k * 37) % 300, b = (k * 91 + 5) % 300;
    const Vector diff = (pts.row(a) - pts.row(b)).transpose();
    const double in_plane = (proj * diff).norm();
    CHECK((p.scores.row(a) - p.scores.row(b)).norm() == doctest::Approx(in_plane).epsilon(1e-10));
  }
}

TEST_CASE("swap diagnostics on exchanged centroids") {
  Matrix c(2, 4);
  c << 1, 2, 3, 4, 3, 4, 1, 2;
  CHECK(swap_gap(c, 2) == 0.0);
  CHECK(centroid_distance(c) == doctest::Approx(4.0));
  const Matrix canon = canonicalize_draws(c, 2);
  CHECK(canon.row(0) == canon.row(1));
}

TEST_CASE("histogram bin rule") {
  Vector v(5);
  v << 0.0, 0.25, 0.5, 0.75, 1.0;
  const Histogram h = histogram(v, 4);
  CHECK(h.edges.size() == 5);
  CHECK(h.counts == std::vector<int>{1, 1, 1, 2});
  const Histogram flat = histogram(Vector::Constant(7, 2.0));
  CHECK(flat.edges[0] == 1.5);
  CHECK(flat.edges[50] == 2.5);
  CHECK(std::accumulate(flat.counts.begin(), flat.counts.end(), 0) == 7);
}

TEST_CASE("export_traces writes traces, histograms and SVGs") {
  Rng rng = make_stream(66, 0);
  std::normal_distribution<double> normal;
  PosteriorDraws d;
  d.d = 2;
  d.p = 2;
  d.draws.resize(137, 4);
  for (int i = 0; i < 137; ++i)
    for (int j = 0; j < 4; ++j) d.draws(i, j) = normal(rng);
  const auto dir = std::filesystem::temp_directory_path() / "zilr_trace_test";
  std::filesystem::remove_all(dir);
  const auto files = export_traces(d, dir);
  CHECK(files.size() == 16);
  CHECK(count_lines(dir / "trace_beta_0.csv") == 138);
  std::ifstream hist(dir / "hist_gamma_1.csv");
  std::string line;
  std::getline(hist, line);
  CHECK(line == "bin_lower,bin_upper,count");
  int total = 0, bins = 0;
  while (std::getline(hist, line)) {
    total += std::stoi(line.substr(line.rfind(',') + 1));
    ++bins;
  }
  CHECK(bins == 50);
  CHECK(total == 137);
  std::ifstream svg(dir / "trace_beta_1.svg");
  std::getline(svg, line);
  CHECK(line.rfind("<svg", 0) == 0);
  std::filesystem::remove_all(dir);
}
