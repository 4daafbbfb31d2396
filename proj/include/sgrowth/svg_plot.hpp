#pragma once

// Minimal deterministic SVG line charts with an optional second y-axis.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sgrowth/core_types.hpp"

namespace sgrowth::plot {

enum class Axis { Left, Right };
enum class Mark { Line, Points };

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  Mark mark = Mark::Line;
  Axis axis = Axis::Left;
  std::string color;  ///< empty picks from the palette by position
};

struct Figure {
  std::string title;
  std::string x_label;
  std::string left_label;
  std::string right_label;  ///< a right axis is drawn only if some series uses it
  std::vector<Series> series;
  std::vector<std::string> notes;  ///< free text lines under the legend
  double width = 800.0;
  double height = 500.0;
};

/// Renders the figure. Output depends only on the figure contents.
std::string render_svg(const Figure& fig);

/// Throws IoError when the file cannot be written.
void write_svg(const std::filesystem::path& path, const Figure& fig);

/// Data points of a series as markers, values multiplied by `scale`.
Series data_series(const AnnualSeries& s, std::string label, Axis axis, double scale = 1.0);

using Years = std::pair<int, int>;

/// Working time in hours per week reconstructed from the nation's GDP and
/// capital curves (left), with the industrial evolution in 1000 US$ (right).
Figure working_time_figure(const NationParams& n, const ModelConstants& c, Years years = {1800, 2100});

/// GDP scaled to the capital amplitude next to physical capital, for the
/// evolution alone and for the nation's recovery, in 1000 US$.
Figure time_shift_figure(const NationParams& n, const ModelConstants& c, Years years = {1850, 2100});

/// National recoveries and the evolution in 1000 US$ (right) with the
/// life expectancy in years (left).
Figure recoveries_figure(const std::vector<NationParams>& nations, const ModelConstants& c,
                         Years years = {1850, 2100});

}  // namespace sgrowth::plot
