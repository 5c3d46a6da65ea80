#pragma once

#include <optional>
#include <string>
#include <vector>

#include "matchfn/common.hpp"

namespace matchfn {

/// Minimal static line charts as standalone SVG. A nullopt value breaks
/// the polyline, rendering a visible gap.
struct ChartSeries {
  std::string name;
  std::vector<std::pair<Month, std::optional<double>>> points;
};

struct LineChart {
  std::string title;
  std::string y_label;
  std::vector<ChartSeries> series;
  int width = 860;
  int height = 420;

  std::string render() const;
};

}  // namespace matchfn
