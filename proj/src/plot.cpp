#include "pacekit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "pacekit/errors.hpp"
#include "pacekit/io.hpp"

namespace pacekit {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo;
  double hi;
  bool log;

  double map(double v, double pixel_lo, double pixel_hi) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double x = log ? std::log10(v) : v;
    const double w = b > a ? (x - a) / (b - a) : 0.5;
    return pixel_lo + w * (pixel_hi - pixel_lo);
  }
};

std::vector<double> ticks(const Axis& axis) {
  std::vector<double> out;
  if (axis.log) {
    for (double d = std::floor(std::log10(axis.lo)); d <= std::ceil(std::log10(axis.hi)); d += 1) {
      const double v = std::pow(10.0, d);
      if (v >= axis.lo * (1 - 1e-12) && v <= axis.hi * (1 + 1e-12)) out.push_back(v);
    }
    return out;
  }
  for (int i = 0; i <= 5; ++i) out.push_back(axis.lo + (axis.hi - axis.lo) * i / 5.0);
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  std::size_t points = 0;
  for (const auto& s : spec.series) {
    require(s.x.size() == s.y.size(), ErrorCode::invalid_argument,
            "series '" + s.label + "' has mismatched x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (spec.log_x && !(s.x[i] > 0.0)) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
      ++points;
    }
  }
  require(points > 0, ErrorCode::empty_table, "nothing to plot");
  if (x_hi == x_lo) {
    x_lo = spec.log_x ? x_lo / 2 : x_lo - 0.5;
    x_hi = spec.log_x ? x_hi * 2 : x_hi + 0.5;
  }
  y_lo = std::min(y_lo, 0.0);
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const Axis xa{x_lo, x_hi, spec.log_x};
  const Axis ya{y_lo, y_hi * 1.05, false};

  const double px0 = kLeft;
  const double px1 = kWidth - kRight;
  const double py0 = kHeight - kBottom;
  const double py1 = kTop;

  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << kWidth << R"(" height=")"
      << kHeight << R"(" font-family="sans-serif" font-size="12">)" << '\n'
      << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n'
      << R"(<text x=")" << kWidth / 2 << R"(" y="22" text-anchor="middle" font-size="15">)"
      << escape_xml(spec.title) << "</text>\n";
  svg << R"(<line x1=")" << px0 << R"(" y1=")" << py0 << R"(" x2=")" << px1 << R"(" y2=")" << py0
      << R"(" stroke="black"/>)" << '\n'
      << R"(<line x1=")" << px0 << R"(" y1=")" << py0 << R"(" x2=")" << px0 << R"(" y2=")" << py1
      << R"(" stroke="black"/>)" << '\n';
  for (double t : ticks(xa)) {
    const double x = xa.map(t, px0, px1);
    svg << R"(<line x1=")" << x << R"(" y1=")" << py0 << R"(" x2=")" << x << R"(" y2=")"
        << py0 + 5 << R"(" stroke="black"/>)" << R"(<text x=")" << x << R"(" y=")" << py0 + 18
        << R"(" text-anchor="middle">)" << fmt(t) << "</text>\n";
  }
  for (double t : ticks(ya)) {
    const double y = ya.map(t, py0, py1);
    svg << R"(<line x1=")" << px0 - 5 << R"(" y1=")" << y << R"(" x2=")" << px0 << R"(" y2=")" << y
        << R"(" stroke="black"/>)" << R"(<text x=")" << px0 - 8 << R"(" y=")" << y + 4
        << R"(" text-anchor="end">)" << fmt(t) << "</text>\n";
  }
  svg << R"(<text x=")" << (px0 + px1) / 2 << R"(" y=")" << kHeight - 18
      << R"(" text-anchor="middle">)" << escape_xml(spec.x_label) << "</text>\n"
      << R"(<text x="18" y=")" << (py0 + py1) / 2 << R"(" text-anchor="middle" transform="rotate(-90 18 )"
      << (py0 + py1) / 2 << ")\">" << escape_xml(spec.y_label) << "</text>\n";

  for (std::size_t k = 0; k < spec.series.size(); ++k) {
    const auto& s = spec.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (spec.log_x && !(s.x[i] > 0.0)) continue;
      pts.emplace_back(xa.map(s.x[i], px0, px1), ya.map(s.y[i], py0, py1));
    }
    if (spec.kind == PlotKind::line) {
      std::sort(pts.begin(), pts.end());
      svg << R"(<polyline fill="none" stroke=")" << color << R"(" stroke-width="2" points=")";
      for (const auto& [x, y] : pts) svg << x << ',' << y << ' ';
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : pts) {
      svg << R"(<circle cx=")" << x << R"(" cy=")" << y << R"(" r=")"
          << (spec.kind == PlotKind::line ? 3 : 2.5) << R"(" fill=")" << color
          << R"(" fill-opacity="0.7"/>)" << '\n';
    }
    const double ly = kTop + 20.0 * static_cast<double>(k) + 10.0;
    svg << R"(<rect x=")" << px1 + 15 << R"(" y=")" << ly - 8 << R"(" width="12" height="12" fill=")"
        << color << R"("/>)" << R"(<text x=")" << px1 + 32 << R"(" y=")" << ly + 2 << R"(">)"
        << escape_xml(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const PlotSpec& spec, const std::string& path) {
  const std::string svg = render_svg(spec);
  std::ostringstream csv;
  csv.precision(17);
  csv << "series,x,y\n";
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) csv << s.label << ',' << s.x[i] << ',' << s.y[i] << '\n';
  }
  write_text_file(path, svg);
  write_text_file(path + ".csv", csv.str());
}

PlotSpec sweep_plot(std::span<const SweepRow> rows) {
  PlotSpec spec;
  spec.kind = PlotKind::line;
  spec.title = "Utility ratio against training samples";
  spec.x_label = "samples per episode (n)";
  spec.y_label = "mean utility / hindsight";
  spec.log_x = true;
  std::map<double, Series> by_frac;
  for (const auto& r : rows) {
    auto& s = by_frac[r.budget_frac];
    s.label = "budget " + fmt(r.budget_frac);
    s.x.push_back(static_cast<double>(r.n));
    s.y.push_back(r.mean);
  }
  for (auto& [_, s] : by_frac) spec.series.push_back(std::move(s));
  return spec;
}

PlotSpec compare_plot(std::span<const RunRecord> runs) {
  PlotSpec spec;
  spec.kind = PlotKind::scatter;
  spec.title = "Utility ratio against budget";
  spec.x_label = "budget / buy-all spend";
  spec.y_label = "utility / hindsight";
  std::map<Algorithm, Series> by_algo;
  for (const auto& r : runs) {
    for (const auto& a : r.results) {
      auto& s = by_algo[a.algorithm];
      s.label = std::string(algorithm_name(a.algorithm));
      s.x.push_back(r.budget_frac);
      s.y.push_back(a.ratio);
    }
  }
  for (auto& [_, s] : by_algo) spec.series.push_back(std::move(s));
  return spec;
}

}  // namespace pacekit
