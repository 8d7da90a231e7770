/*
   Copyright 2026 The aniso-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace aniso::lab {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartLabels {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;  // non-positive values are dropped on a log axis
};

// Self-contained SVG documents: polylines, axes, legend, no external assets.
std::string svg_line_chart(const ChartLabels& labels, const std::vector<Series>& series);
std::string svg_bar_chart(const ChartLabels& labels, const std::vector<std::string>& names,
                          const std::vector<double>& values);

/// Contours of f over [x0, x1] x [y0, y1] (marching squares on a grid) with
/// the given paths drawn on top.
struct ContourSpec {
  std::function<double(double, double)> f;
  double x0 = -3.0, x1 = 3.0, y0 = -3.0, y1 = 3.0;
  int grid = 120;
  std::vector<double> levels;
};

std::string svg_contour_chart(const ChartLabels& labels, const ContourSpec& contour, const std::vector<Series>& paths);

}  // namespace aniso::lab
