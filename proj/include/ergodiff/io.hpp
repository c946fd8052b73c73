#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "ergodiff/ergodic.hpp"
#include "ergodiff/integrator.hpp"

namespace ergodiff {

/// printf %.17g: round-trip exact for every double.
std::string format_double(double x);

/// Header "t,x1,x2", one row per checkpoint.
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

/// Header "T,f_T,seed,start_x1,start_x2,center_x1,center_x2", rows of all series in order.
void write_series_csv(std::ostream& os, const std::vector<ErgodicSeries>& series);

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::vector<std::pair<double, double>>> lines;
};

/// 800x600 SVG with linear axes, round-number ticks and one polyline per line.
std::string render_svg(const LineChart& chart);

/// Round-number tick positions covering [lo, hi] with about `target` intervals.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

}  // namespace ergodiff
