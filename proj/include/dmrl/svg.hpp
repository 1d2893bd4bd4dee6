#pragma once

#include <optional>
#include <string>
#include <vector>

namespace dmrl {

struct HLine {
  double y = 0.0;
  std::string color;
  std::string label;
};

// Minimal deterministic SVG writers; all numbers printed with fixed
// precision so identical input gives identical bytes.
std::string svg_line_chart(const std::string& title, const std::vector<double>& ys,
                           double y_min, double y_max, const std::vector<HLine>& refs);

std::string svg_scatter(const std::string& title, const std::vector<double>& xs,
                        const std::vector<double>& ys, const std::vector<int>& groups);

// values row-major rows x cols; NaN cells are drawn grey.
std::string svg_heatmap(const std::string& title, int rows, int cols,
                        const std::vector<double>& values, double lo, double hi);

}  // namespace dmrl
