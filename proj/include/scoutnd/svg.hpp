#pragma once

#include <string>
#include <utility>
#include <vector>

namespace scoutnd::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool step = false;  // staircase interpolation (data profiles)
  int width = 820;
  int height = 560;
};

// Multi-series line/step plot. Each series becomes one
// <polyline class="data" data-label="..."> whose points are the data
// coordinates mapped into the canvas; tests compare those structurally.
std::string line_plot(const std::vector<Series>& series, const PlotOptions& opts);

struct BoxStats {
  std::string label;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

// Grouped box plot (used for the per-dimension gradient-variance figure).
// Groups share an x position; boxes within a group get distinct colors.
std::string box_plot(const std::vector<std::string>& group_labels,
                     const std::vector<std::string>& series_labels,
                     const std::vector<std::vector<BoxStats>>& boxes,
                     const PlotOptions& opts);

// Extracts (label, points) pairs back out of a plot produced by line_plot;
// test support for structural comparison of plotted coordinates.
std::vector<Series> parse_data_polylines(const std::string& svg_text);

}  // namespace scoutnd::svg
