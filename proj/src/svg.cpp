#include "zilr/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace zilr::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 45.0;
constexpr std::size_t kMaxLinePoints = 2000;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;

  [[nodiscard]] double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  [[nodiscard]] double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void pad(double& lo, double& hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double m = 0.04 * (hi - lo);
  lo -= m;
  hi += m;
}

Frame frame_for(const std::vector<Series>& series) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Frame f{inf, -inf, inf, -inf};
  for (const Series& s : series) {
    for (double x : s.x) {
      f.x0 = std::min(f.x0, x);
      f.x1 = std::max(f.x1, x);
    }
    for (double y : s.y) {
      f.y0 = std::min(f.y0, y);
      f.y1 = std::max(f.y1, y);
    }
  }
  pad(f.x0, f.x1);
  pad(f.y0, f.y1);
  return f;
}

void open_doc(std::ostringstream& o, const Frame& f, const std::string& title,
              const std::string& xlabel, const std::string& ylabel) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
    << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(title) << "</text>\n";
  const double xa = kLeft, xb = kWidth - kRight, ya = kTop, yb = kHeight - kBottom;
  o << "<rect x=\"" << xa << "\" y=\"" << ya << "\" width=\"" << xb - xa << "\" height=\""
    << yb - ya << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double xv = f.x0 + (f.x1 - f.x0) * t / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * t / 4.0;
    o << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << yb + 15
      << "\" text-anchor=\"middle\" font-size=\"10\">" << num(xv) << "</text>\n";
    o << "<text x=\"" << xa - 4 << "\" y=\"" << num(f.py(yv) + 3)
      << "\" text-anchor=\"end\" font-size=\"10\">" << num(yv) << "</text>\n";
  }
  o << "<text x=\"" << (xa + xb) / 2 << "\" y=\"" << kHeight - 8
    << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xlabel) << "</text>\n";
  o << "<text x=\"14\" y=\"" << (ya + yb) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
    << "transform=\"rotate(-90 14 " << (ya + yb) / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

void legend(std::ostringstream& o, const std::vector<Series>& series) {
  double y = kTop + 14;
  for (const Series& s : series) {
    if (s.label.empty()) continue;
    o << "<rect x=\"" << kWidth - kRight - 110 << "\" y=\"" << y - 9
      << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
    o << "<text x=\"" << kWidth - kRight - 96 << "\" y=\"" << y << "\" font-size=\"11\">"
      << escape(s.label) << "</text>\n";
    y += 15;
  }
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel) {
  const Frame f = frame_for(series);
  std::ostringstream o;
  open_doc(o, f, title, xlabel, ylabel);
  for (const Series& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxLinePoints);
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < n; i += stride) o << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
    o << "\"/>\n";
  }
  legend(o, series);
  o << "</svg>\n";
  return o.str();
}

std::string scatter(const std::vector<Series>& series, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel) {
  const Frame f = frame_for(series);
  std::ostringstream o;
  open_doc(o, f, title, xlabel, ylabel);
  for (const Series& s : series) {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    o << "<g fill=\"" << s.color << "\" fill-opacity=\"0.4\">\n";
    for (std::size_t i = 0; i < n; ++i)
      o << "<circle cx=\"" << num(f.px(s.x[i])) << "\" cy=\"" << num(f.py(s.y[i]))
        << "\" r=\"1.5\"/>\n";
    o << "</g>\n";
  }
  legend(o, series);
  o << "</svg>\n";
  return o.str();
}

std::string histogram(const Vector& edges, const std::vector<int>& counts,
                      const std::string& title) {
  const int top = counts.empty() ? 1 : std::max(1, *std::max_element(counts.begin(), counts.end()));
  Frame f{edges[0], edges[edges.size() - 1], 0.0, static_cast<double>(top)};
  if (f.x0 == f.x1) f.x1 = f.x0 + 1.0;
  std::ostringstream o;
  open_doc(o, f, title, "value", "count");
  o << "<g fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\">\n";
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double xa = f.px(edges[static_cast<Eigen::Index>(k)]);
    const double xb = f.px(edges[static_cast<Eigen::Index>(k) + 1]);
    const double ya = f.py(counts[k]);
    o << "<rect x=\"" << num(xa) << "\" y=\"" << num(ya) << "\" width=\"" << num(xb - xa)
      << "\" height=\"" << num(f.py(0.0) - ya) << "\"/>\n";
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

std::string boxplots(const std::vector<std::vector<double>>& groups,
                     const std::vector<std::string>& labels, const std::string& title,
                     const double* reference) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Frame f{0.0, static_cast<double>(groups.size()), inf, -inf};
  for (const auto& g : groups)
    for (double v : g) {
      if (!std::isfinite(v)) continue;
      f.y0 = std::min(f.y0, v);
      f.y1 = std::max(f.y1, v);
    }
  if (reference) {
    f.y0 = std::min(f.y0, *reference);
    f.y1 = std::max(f.y1, *reference);
  }
  pad(f.y0, f.y1);
  std::ostringstream o;
  open_doc(o, f, title, "", "estimate");
  if (reference) {
    o << "<line x1=\"" << kLeft << "\" x2=\"" << kWidth - kRight << "\" y1=\"" << num(f.py(*reference))
      << "\" y2=\"" << num(f.py(*reference)) << "\" stroke=\"red\" stroke-dasharray=\"4 3\"/>\n";
  }
  auto quantile = [](const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  for (std::size_t k = 0; k < groups.size(); ++k) {
    std::vector<double> v;
    for (double x : groups[k])
      if (std::isfinite(x)) v.push_back(x);
    const double cx = f.px(static_cast<double>(k) + 0.5);
    if (k < labels.size())
      o << "<text x=\"" << num(cx) << "\" y=\"" << kHeight - kBottom + 28
        << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(labels[k]) << "</text>\n";
    if (v.empty()) continue;
    std::sort(v.begin(), v.end());
    const double q1 = quantile(v, 0.25), q2 = quantile(v, 0.5), q3 = quantile(v, 0.75);
    const double iqr = q3 - q1;
    double wlo = q1, whi = q3;
    for (double x : v) {
      if (x >= q1 - 1.5 * iqr) {
        wlo = x;
        break;
      }
    }
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
      if (*it <= q3 + 1.5 * iqr) {
        whi = *it;
        break;
      }
    }
    const double half = 0.25 * (f.px(1.0) - f.px(0.0));
    o << "<line x1=\"" << num(cx) << "\" x2=\"" << num(cx) << "\" y1=\"" << num(f.py(wlo))
      << "\" y2=\"" << num(f.py(whi)) << "\" stroke=\"black\"/>\n";
    o << "<rect x=\"" << num(cx - half) << "\" y=\"" << num(f.py(q3)) << "\" width=\""
      << num(2 * half) << "\" height=\"" << num(f.py(q1) - f.py(q3))
      << "\" fill=\"#aec7e8\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << num(cx - half) << "\" x2=\"" << num(cx + half) << "\" y1=\""
      << num(f.py(q2)) << "\" y2=\"" << num(f.py(q2)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double x : v)
      if (x < wlo || x > whi)
        o << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(f.py(x)) << "\" r=\"2\" fill=\"none\" stroke=\"black\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace zilr::svg
