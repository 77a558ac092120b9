#pragma once

// Minimal static SVG charts.

#include <string>
#include <vector>

#include "zilr/model.hpp"

namespace zilr::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
};

/// Line chart of one or more series.
std::string line_chart(const std::vector<Series>& series, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel);

/// Scatter plot; one colour per series.
std::string scatter(const std::vector<Series>& series, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel);

/// Bar chart of a histogram given its edges and counts.
std::string histogram(const Vector& edges, const std::vector<int>& counts,
                      const std::string& title);

/// Side-by-side box plots (quartiles, 1.5 IQR whiskers) with an optional
/// horizontal reference line.
std::string boxplots(const std::vector<std::vector<double>>& groups,
                     const std::vector<std::string>& labels, const std::string& title,
                     const double* reference = nullptr);

}  // namespace zilr::svg
