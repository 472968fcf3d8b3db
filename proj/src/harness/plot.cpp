#include "rmtx/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rmtx/errors.hpp"
#include "rmtx/text.hpp"

namespace rmtx {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr double kLogFloor = 1e-6;

constexpr const char* kColors[] = {"#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
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

// Two decimals are plenty for pixel coordinates and keep files small.
std::string px(double v) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << v;
  return s.str();
}

std::string tick_label(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

std::string legend_entry(const LawCurve& c) {
  std::string s(to_string(c.law));
  if (!c.parameters.empty()) {
    s += " (";
    bool first = true;
    for (const auto& [k, v] : c.parameters) {
      if (!first) s += ", ";
      s += k + "=" + tick_label(v);
      first = false;
    }
    s += ")";
  }
  return s;
}

struct Frame {
  double x0, x1, y0, y1;
  bool log_y;

  [[nodiscard]] double sx(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  [[nodiscard]] double sy(double y) const {
    const double v = log_y ? std::log10(std::max(y, kLogFloor)) : y;
    return kHeight - kBottom - (v - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

}  // namespace

std::string render_plot(const EmpiricalDistribution& dist, const std::vector<LawCurve>& overlays,
                        PlotStyle style, const PlotLabels& labels) {
  if (dist.bins() == 0) throw InvalidArgument("emit_plot: empty distribution");
  const bool log_y = style == PlotStyle::LogY;
  const std::vector<double> centers = dist.bin_centers();

  Frame f{dist.bin_edges.front(), dist.bin_edges.back(), 0.0, 0.0, log_y};
  double y_max = 0.0;
  for (double d : dist.density) y_max = std::max(y_max, d);
  for (const LawCurve& c : overlays) {
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      if (c.grid[i] < f.x0 || c.grid[i] > f.x1 || !std::isfinite(c.density[i])) continue;
      y_max = std::max(y_max, c.density[i]);
    }
  }
  if (!(y_max > 0.0)) y_max = 1.0;
  if (log_y) {
    f.y0 = std::log10(kLogFloor);
    f.y1 = std::ceil(std::log10(y_max * 1.5));
  } else {
    f.y1 = y_max * 1.08;
  }

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!labels.provenance.empty()) svg << "<!-- " << escape(labels.provenance) << " -->\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and ticks.
  const double ax0 = kLeft;
  const double ax1 = kWidth - kRight;
  const double ay0 = kHeight - kBottom;
  const double ay1 = kTop;
  svg << "<g stroke=\"black\" fill=\"none\"><rect x=\"" << px(ax0) << "\" y=\"" << px(ay1) << "\" width=\""
      << px(ax1 - ax0) << "\" height=\"" << px(ay0 - ay1) << "\"/></g>\n";
  svg << "<g>\n";
  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double x = f.x0 + (f.x1 - f.x0) * i / kTicks;
    const double X = f.sx(x);
    svg << "<line x1=\"" << px(X) << "\" y1=\"" << px(ay0) << "\" x2=\"" << px(X) << "\" y2=\"" << px(ay0 + 5)
        << "\" stroke=\"black\"/><text x=\"" << px(X) << "\" y=\"" << px(ay0 + 18)
        << "\" text-anchor=\"middle\">" << tick_label(x) << "</text>\n";
  }
  if (log_y) {
    for (int e = static_cast<int>(f.y0); e <= static_cast<int>(f.y1); ++e) {
      const double Y = f.sy(std::pow(10.0, e));
      svg << "<line x1=\"" << px(ax0 - 5) << "\" y1=\"" << px(Y) << "\" x2=\"" << px(ax0) << "\" y2=\"" << px(Y)
          << "\" stroke=\"black\"/><text x=\"" << px(ax0 - 8) << "\" y=\"" << px(Y + 4)
          << "\" text-anchor=\"end\">1e" << e << "</text>\n";
    }
  } else {
    for (int i = 0; i <= kTicks; ++i) {
      const double y = f.y1 * i / kTicks;
      const double Y = f.sy(y);
      svg << "<line x1=\"" << px(ax0 - 5) << "\" y1=\"" << px(Y) << "\" x2=\"" << px(ax0) << "\" y2=\"" << px(Y)
          << "\" stroke=\"black\"/><text x=\"" << px(ax0 - 8) << "\" y=\"" << px(Y + 4)
          << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
    }
  }
  svg << "</g>\n";
  svg << "<text x=\"" << px((ax0 + ax1) / 2) << "\" y=\"" << px(kHeight - 15)
      << "\" text-anchor=\"middle\">" << escape(labels.x_label) << "</text>\n";
  svg << "<text transform=\"translate(18," << px((ay0 + ay1) / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(labels.y_label) << "</text>\n";
  if (!labels.title.empty()) {
    svg << "<text x=\"" << px((ax0 + ax1) / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(labels.title) << "</text>\n";
  }

  // Histogram markers.
  svg << "<g fill=\"#1f77b4\">\n";
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (log_y && dist.density[i] < kLogFloor) continue;
    svg << "<circle cx=\"" << px(f.sx(centers[i])) << "\" cy=\"" << px(f.sy(dist.density[i])) << "\" r=\"2.5\"/>\n";
  }
  svg << "</g>\n";

  // Overlays; non-finite or out-of-range points break the line.
  for (std::size_t k = 0; k < overlays.size(); ++k) {
    const LawCurve& c = overlays[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    auto flush = [&] {
      if (!points.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
            << "\"/>\n";
        points.clear();
      }
    };
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      const double x = c.grid[i];
      double y = c.density[i];
      if (x < f.x0 || x > f.x1 || !std::isfinite(y) || (log_y && y < kLogFloor)) {
        flush();
        continue;
      }
      if (!log_y) y = std::min(y, f.y1);
      points += px(f.sx(x)) + "," + px(f.sy(y)) + " ";
    }
    flush();
  }

  // Legend.
  double ly = kTop + 16;
  const double lx = ax1 - 250;
  svg << "<g>\n<circle cx=\"" << px(lx) << "\" cy=\"" << px(ly - 4) << "\" r=\"3\" fill=\"#1f77b4\"/><text x=\""
      << px(lx + 12) << "\" y=\"" << px(ly) << "\">histogram (n=" << dist.sample_count << ")</text>\n";
  for (std::size_t k = 0; k < overlays.size(); ++k) {
    ly += 16;
    svg << "<line x1=\"" << px(lx - 6) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(lx + 6) << "\" y2=\""
        << px(ly - 4) << "\" stroke=\"" << kColors[k % std::size(kColors)] << "\" stroke-width=\"2\"/><text x=\""
        << px(lx + 12) << "\" y=\"" << px(ly) << "\">" << escape(legend_entry(overlays[k])) << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void emit_plot(const EmpiricalDistribution& dist, const std::vector<LawCurve>& overlays, PlotStyle style,
               const std::filesystem::path& path, const PlotLabels& labels) {
  const std::string text = render_plot(dist, overlays, style, labels);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace rmtx
