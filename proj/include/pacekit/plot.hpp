#pragma once

#include <span>
#include <string>
#include <vector>

#include "pacekit/harness.hpp"

namespace pacekit {

enum class PlotKind { line, scatter };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  PlotKind kind = PlotKind::line;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<Series> series;
};

// Standalone SVG document. Throws empty_table when no series has a point.
std::string render_svg(const PlotSpec& spec);

// Writes the SVG to `path` and the plotted points to `path` + ".csv"
// (series,x,y).
void emit_plot(const PlotSpec& spec, const std::string& path);

// Mean ratio against n, one line per budget fraction, log-scaled x axis.
PlotSpec sweep_plot(std::span<const SweepRow> rows);
// Ratio against budget fraction, one scatter series per algorithm.
PlotSpec compare_plot(std::span<const RunRecord> runs);

}  // namespace pacekit
