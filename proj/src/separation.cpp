#include "zilr/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "zilr/parallel.hpp"
#include "zilr/rng.hpp"

namespace zilr {

std::string_view to_string(SeparationStatus s) {
  switch (s) {
    case SeparationStatus::DoublySeparated: return "doubly_separated";
    case SeparationStatus::NotSeparated: return "not_separated";
    case SeparationStatus::MarginFound: return "margin_found";
    case SeparationStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

LpResult solve_lp_origin_feasible(const Matrix& A, const Vector& b, const Vector& c,
                                  int max_pivots) {
  const Eigen::Index m = A.rows();
  const Eigen::Index N = A.cols();
  constexpr double eps = 1e-11;

  // Rows 0..m-1: [A | b]; row m: [-c | objective].
  Matrix T(m + 1, N + 1);
  T.topLeftCorner(m, N) = A;
  T.topRightCorner(m, 1) = b;
  T.bottomLeftCorner(1, N) = -c.transpose();
  T(m, N) = 0.0;

  std::vector<Eigen::Index> col_label(N);  // nonbasic variable in each column
  std::vector<Eigen::Index> row_label(m);  // basic variable in each row
  for (Eigen::Index j = 0; j < N; ++j) col_label[j] = j;
  for (Eigen::Index i = 0; i < m; ++i) row_label[i] = N + i;

  LpResult res;
  for (;;) {
    // Bland: entering variable with the smallest label among improving columns.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < N; ++j) {
      if (T(m, j) < -eps && (enter < 0 || col_label[j] < col_label[enter])) enter = j;
    }
    if (enter < 0) break;
    if (res.pivots >= max_pivots) {
      res.status = LpResult::Status::IterationLimit;
      break;
    }
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      const double a = T(i, enter);
      if (a <= eps) continue;
      const double ratio = T(i, N) / a;
      if (leave < 0 || ratio < best - 1e-14) {
        best = ratio;
        leave = i;
      } else if (ratio <= best + 1e-14 && row_label[i] < row_label[leave]) {
        leave = i;
      }
    }
    if (leave < 0) {
      res.status = LpResult::Status::Unbounded;
      break;
    }
    const double piv = T(leave, enter);
    const Vector col = T.col(enter);
    const Eigen::RowVectorXd row = T.row(leave);
    T.noalias() -= (col / piv) * row;
    T.row(leave) = row / piv;
    T.col(enter) = -col / piv;
    T(leave, enter) = 1.0 / piv;
    std::swap(col_label[enter], row_label[leave]);
    ++res.pivots;
  }

  res.x = Vector::Zero(N);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (row_label[i] < N) res.x[row_label[i]] = std::max(0.0, T(i, N));
  }
  res.objective = c.dot(res.x);
  return res;
}

bool verify_separating_direction(const Dataset& data, const Vector& v, const Vector& w,
                                 double tol, int* witness) {
  const Vector sx = data.X * v;
  const Vector sz = data.zmat() * w;
  double strongest = 0.0;
  int arg = -1;
  for (int i = 0; i < data.n(); ++i) {
    const double sign = data.y[i] == 1.0 ? 1.0 : -1.0;
    const double a = sign * sx[i];
    const double b = sign * sz[i];
    if (a < -tol || b < -tol) return false;
    const double strength = std::max(a, b);
    if (strength > strongest) {
      strongest = strength;
      arg = i;
    }
  }
  if (witness) *witness = arg;
  return strongest > tol;
}

SeparationCertificate detect_double_separation(const Dataset& data, double tol) {
  const int n = data.n();
  const int d = data.d();
  const int p = data.p();
  const int k = d + p;
  const Matrix& Z = data.zmat();

  // Variables u = u_plus - u_minus with u = (v, w).
  Matrix A = Matrix::Zero(2 * n + 2 * k, 2 * k);
  Vector b = Vector::Zero(2 * n + 2 * k);
  Vector c = Vector::Zero(2 * k);
  for (int i = 0; i < n; ++i) {
    const double sign = data.y[i] == 1.0 ? 1.0 : -1.0;
    // -sign * v'x_i <= 0 and -sign * w'z_i <= 0
    A.block(2 * i, 0, 1, d) = -sign * data.X.row(i);
    A.block(2 * i, k, 1, d) = sign * data.X.row(i);
    A.block(2 * i + 1, d, 1, p) = -sign * Z.row(i);
    A.block(2 * i + 1, k + d, 1, p) = sign * Z.row(i);
    c.segment(0, d) += sign * data.X.row(i).transpose();
    c.segment(d, p) += sign * Z.row(i).transpose();
  }
  c.tail(k) = -c.head(k);
  for (int j = 0; j < 2 * k; ++j) {
    A(2 * n + j, j) = 1.0;
    b[2 * n + j] = 1.0;
  }

  SeparationCertificate cert;
  const LpResult lp = solve_lp_origin_feasible(A, b, c);
  cert.objective = lp.objective;
  if (lp.status != LpResult::Status::Optimal) {
    cert.status = SeparationStatus::Inconclusive;
    cert.note = "LP solver did not reach optimality";
    return cert;
  }
  if (!(lp.objective > tol)) {
    cert.status = SeparationStatus::NotSeparated;
    cert.note = "no direction with a strict inequality";
    return cert;
  }
  const Vector u = lp.x.head(k) - lp.x.tail(k);
  const double norm = u.norm();
  if (!(norm > 0.0)) {
    cert.status = SeparationStatus::Inconclusive;
    cert.note = "LP returned a zero direction";
    return cert;
  }
  const Vector unit = u / norm;
  int witness = -1;
  if (!verify_separating_direction(data, unit.head(d), unit.tail(p), tol, &witness)) {
    cert.status = SeparationStatus::Inconclusive;
    cert.note = "LP direction failed independent verification";
    return cert;
  }
  cert.status = SeparationStatus::DoublySeparated;
  cert.v = unit.head(d);
  cert.w = unit.tail(p);
  cert.witness_index = witness;
  cert.margin = 0.0;
  return cert;
}

double margin_objective(const Dataset& data, const Vector& v, const Vector& w) {
  const Vector sx = data.X * v;
  const Vector sz = data.zmat() * w;
  constexpr double inf = std::numeric_limits<double>::infinity();
  double min_pos = inf;   // min over y=1 of v'x + w'z
  double max_neg = -inf;  // max over y=0 of min(v'x, w'z)
  for (int i = 0; i < data.n(); ++i) {
    if (data.y[i] == 1.0)
      min_pos = std::min(min_pos, sx[i] + sz[i]);
    else
      max_neg = std::max(max_neg, std::min(sx[i], sz[i]));
  }
  return std::max(-min_pos, max_neg);
}

namespace {

struct MarginRun {
  double best = std::numeric_limits<double>::infinity();
  Vector u;
};

// Value and one subgradient of the margin objective at u = (v, w).
double margin_subgradient(const Dataset& data, const Vector& u, Vector& g) {
  const int d = data.d();
  const int p = data.p();
  const Vector sx = data.X * u.head(d);
  const Vector sz = data.zmat() * u.tail(p);
  constexpr double inf = std::numeric_limits<double>::infinity();
  double min_pos = inf;
  int arg_pos = -1;
  double max_neg = -inf;
  int arg_neg = -1;
  for (int i = 0; i < data.n(); ++i) {
    if (data.y[i] == 1.0) {
      const double s = sx[i] + sz[i];
      if (s < min_pos) {
        min_pos = s;
        arg_pos = i;
      }
    } else {
      const double s = std::min(sx[i], sz[i]);
      if (s > max_neg) {
        max_neg = s;
        arg_neg = i;
      }
    }
  }
  g = Vector::Zero(d + p);
  if (-min_pos >= max_neg) {
    g.head(d) = -data.X.row(arg_pos).transpose();
    g.tail(p) = -data.zmat().row(arg_pos).transpose();
    return -min_pos;
  }
  if (sx[arg_neg] <= sz[arg_neg])
    g.head(d) = data.X.row(arg_neg).transpose();
  else
    g.tail(p) = data.zmat().row(arg_neg).transpose();
  return max_neg;
}

MarginRun descend(const Dataset& data, Vector u, int iters) {
  MarginRun run;
  u.normalize();
  Vector g;
  for (int t = 0; t <= iters; ++t) {
    const double val = margin_subgradient(data, u, g);
    if (val < run.best) {
      run.best = val;
      run.u = u;
    }
    if (t == iters) break;
    // Project the subgradient onto the tangent space, step, retract.
    Vector tangent = g - g.dot(u) * u;
    const double tn = tangent.norm();
    if (!(tn > 0.0)) break;
    const double step = 0.2 / std::sqrt(static_cast<double>(t) + 1.0);
    u -= step * tangent / tn;
    u.normalize();
  }
  return run;
}

}  // namespace

SeparationCertificate estimate_margin(const Dataset& data, const MarginOptions& opts) {
  const int d = data.d();
  const int k = d + data.p();
  // Signed coordinate axes first, then random starts.
  const int n_axes = 2 * k;
  const int total = n_axes + std::max(opts.restarts, 0);
  std::vector<MarginRun> runs(static_cast<std::size_t>(total));
  parallel_for(runs.size(), opts.threads, [&](std::size_t r) {
    Vector u0 = Vector::Zero(k);
    if (static_cast<int>(r) < n_axes) {
      u0[static_cast<int>(r) / 2] = r % 2 == 0 ? 1.0 : -1.0;
    } else {
      Rng rng = make_stream(opts.seed, r);
      std::normal_distribution<double> normal;
      for (int j = 0; j < k; ++j) u0[j] = normal(rng);
    }
    runs[r] = descend(data, u0, opts.iters);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].best < runs[best].best) best = r;
  }
  SeparationCertificate cert;
  cert.objective = runs[best].best;
  cert.v = runs[best].u.head(d);
  cert.w = runs[best].u.tail(data.p());
  cert.margin = std::max(cert.objective, 0.0);
  if (cert.objective > opts.tol) {
    cert.status = SeparationStatus::MarginFound;
    cert.note = "upper bound on the margin infimum; advisory";
  } else {
    cert.status = SeparationStatus::Inconclusive;
    cert.note = "no positive margin found";
  }
  return cert;
}

}  // namespace zilr
