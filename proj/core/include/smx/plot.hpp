#pragma once

#include <string>
#include <vector>

namespace smx {

/// Minimal hand-written SVG line plots. CSVs are the source of truth;
/// these are reading aids only.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void save_svg_plot(const std::vector<PlotSeries>& series,
                   const std::string& title, const std::string& x_label,
                   const std::string& y_label, const std::string& path);

}  // namespace smx
