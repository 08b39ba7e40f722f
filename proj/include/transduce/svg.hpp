// Copyright 2026 The transduce Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Hand-written SVG line plots and heatmaps.

#include <string>
#include <vector>

namespace transduce {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Lines with a legend; non-finite points (and non-positive ones on log axes)
/// break the line.
std::string line_plot_svg(const std::vector<PlotSeries>& series, const PlotOptions& options);

/// Cell-centered heatmap of z (row-major, x outer, y inner) with a color
/// scale legend. NaN cells are drawn hatched-grey.
std::string heatmap_svg(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& z, const PlotOptions& options,
                        const std::string& z_label);

}  // namespace transduce
