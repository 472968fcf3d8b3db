#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rmtx/laws.hpp"
#include "rmtx/stats.hpp"

namespace rmtx {

enum class PlotStyle { Linear, LogY };

struct PlotLabels {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "P(x)";
  /// Free-form provenance line embedded as an SVG comment.
  std::string provenance;
};

/// Standalone SVG: histogram markers, overlay curves and a legend naming each
/// law with its parameters. LogY clips densities below 1e-6.
void emit_plot(const EmpiricalDistribution& dist, const std::vector<LawCurve>& overlays, PlotStyle style,
               const std::filesystem::path& path, const PlotLabels& labels = {});

/// Same, returned as a string.
[[nodiscard]] std::string render_plot(const EmpiricalDistribution& dist,
                                      const std::vector<LawCurve>& overlays, PlotStyle style,
                                      const PlotLabels& labels = {});

}  // namespace rmtx
