#pragma once

#include <string>
#include <vector>

namespace csda {

// Minimal deterministic SVG emitters for the report artifacts. Everything is
// plain XML text; no plotting dependency.

struct SeriesPoint {
  double x;
  double y;
};

struct Series {
  std::string name;
  std::string color;
  std::vector<SeriesPoint> points;
};

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<Series>& series);

// 2x2 heatmap with count and row-percentage per cell.
std::string svg_confusion_matrix(const std::string& title, std::uint64_t tp,
                                 std::uint64_t fp, std::uint64_t fn,
                                 std::uint64_t tn);

}  // namespace csda
