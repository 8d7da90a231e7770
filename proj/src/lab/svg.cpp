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

#include "aniso/lab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace aniso::lab {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;  // legend column
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

const char* color(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct Frame {
  double xmin, xmax, ymin, ymax;
  bool log_y;

  double px(double x) const { return kLeft + (x - xmin) / (xmax - xmin) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    const double v = log_y ? std::log10(y) : y;
    return kHeight - kBottom - (v - ymin) / (ymax - ymin) * (kHeight - kTop - kBottom);
  }
};

void widen(double& lo, double& hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    lo = 0.0;
    hi = 1.0;
  } else if (hi <= lo) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
}

void header(std::ostringstream& out, const ChartLabels& labels) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(labels.title) << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const ChartLabels& labels) {
  const double x_end = kWidth - kRight;
  const double y_end = kHeight - kBottom;
  out << "<line x1=\"" << kLeft << "\" y1=\"" << y_end << "\" x2=\"" << x_end << "\" y2=\"" << y_end
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << y_end
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.xmin + (f.xmax - f.xmin) * i / 4.0;
    const double px = f.px(xv);
    out << "<text x=\"" << num(px) << "\" y=\"" << num(y_end + 16) << "\" text-anchor=\"middle\">" << tick(xv)
        << "</text>\n";
    const double yv = f.ymin + (f.ymax - f.ymin) * i / 4.0;
    const double py = kHeight - kBottom - (yv - f.ymin) / (f.ymax - f.ymin) * (kHeight - kTop - kBottom);
    out << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
        << tick(f.log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
  }
  out << "<text x=\"" << num((kLeft + x_end) / 2) << "\" y=\"" << num(kHeight - 18)
      << "\" text-anchor=\"middle\">" << escape(labels.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << num((kTop + y_end) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(labels.y_label) << "</text>\n";
}

void legend(std::ostringstream& out, const std::vector<std::string>& names) {
  const double x = kWidth - kRight + 16;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 20) << "\" y2=\"" << num(y)
        << "\" stroke=\"" << color(i) << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(x + 26) << "\" y=\"" << num(y + 4) << "\">" << escape(names[i]) << "</text>\n";
  }
}

void polyline(std::ostringstream& out, const Frame& f, const Series& s, const char* stroke) {
  out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
  bool first = true;
  for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
    if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (f.log_y && s.y[i] <= 0.0)) continue;
    if (!first) out << ' ';
    out << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i]));
    first = false;
  }
  out << "\"/>\n";
}

Frame fit(const std::vector<Series>& series, bool log_y) {
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), log_y};
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (log_y && s.y[i] <= 0.0)) continue;
      const double y = log_y ? std::log10(s.y[i]) : s.y[i];
      f.xmin = std::min(f.xmin, s.x[i]);
      f.xmax = std::max(f.xmax, s.x[i]);
      f.ymin = std::min(f.ymin, y);
      f.ymax = std::max(f.ymax, y);
    }
  }
  widen(f.xmin, f.xmax);
  widen(f.ymin, f.ymax);
  return f;
}

}  // namespace

std::string svg_line_chart(const ChartLabels& labels, const std::vector<Series>& series) {
  std::ostringstream out;
  header(out, labels);
  const Frame f = fit(series, labels.log_y);
  axes(out, f, labels);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < series.size(); ++i) {
    polyline(out, f, series[i], color(i));
    names.push_back(series[i].name);
  }
  legend(out, names);
  out << "</svg>\n";
  return out.str();
}

std::string svg_bar_chart(const ChartLabels& labels, const std::vector<std::string>& names,
                          const std::vector<double>& values) {
  std::ostringstream out;
  header(out, labels);
  double hi = 0.0;
  for (double v : values) hi = std::max(hi, std::isfinite(v) ? v : 0.0);
  if (hi <= 0.0) hi = 1.0;
  const Frame f{0.0, static_cast<double>(std::max<std::size_t>(names.size(), 1)), 0.0, hi, false};
  axes(out, f, labels);
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(std::max<std::size_t>(names.size(), 1));
  for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) {
    const double v = std::isfinite(values[i]) ? std::max(values[i], 0.0) : 0.0;
    const double x = kLeft + slot * static_cast<double>(i) + slot * 0.15;
    const double y = f.py(v);
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(slot * 0.7) << "\" height=\""
        << num(kHeight - kBottom - y) << "\" fill=\"" << color(i) << "\"/>\n";
    out << "<text x=\"" << num(x + slot * 0.35) << "\" y=\"" << num(y - 4) << "\" text-anchor=\"middle\">"
        << tick(values[i]) << "</text>\n";
  }
  legend(out, names);
  out << "</svg>\n";
  return out.str();
}

std::string svg_contour_chart(const ChartLabels& labels, const ContourSpec& c, const std::vector<Series>& paths) {
  std::ostringstream out;
  header(out, labels);
  const Frame f{c.x0, c.x1, c.y0, c.y1, false};
  axes(out, f, labels);

  const int n = std::max(c.grid, 2);
  std::vector<double> v(static_cast<std::size_t>((n + 1) * (n + 1)));
  auto at = [&](int i, int j) -> double& { return v[static_cast<std::size_t>(j * (n + 1) + i)]; };
  auto gx = [&](int i) { return c.x0 + (c.x1 - c.x0) * i / n; };
  auto gy = [&](int j) { return c.y0 + (c.y1 - c.y0) * j / n; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) at(i, j) = c.f(gx(i), gy(j));
  }

  out << "<g stroke=\"#bbbbbb\" stroke-width=\"0.8\" fill=\"none\">\n";
  for (double level : c.levels) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        // Corners counter-clockwise from bottom-left; collect edge crossings.
        const double xs[4] = {gx(i), gx(i + 1), gx(i + 1), gx(i)};
        const double ys[4] = {gy(j), gy(j), gy(j + 1), gy(j + 1)};
        const double vs[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
        double px[4];
        double py[4];
        int hits = 0;
        for (int e = 0; e < 4; ++e) {
          const int a = e;
          const int b = (e + 1) % 4;
          if ((vs[a] < level) != (vs[b] < level)) {
            const double t = (level - vs[a]) / (vs[b] - vs[a]);
            px[hits] = xs[a] + t * (xs[b] - xs[a]);
            py[hits] = ys[a] + t * (ys[b] - ys[a]);
            ++hits;
          }
        }
        for (int h = 0; h + 1 < hits; h += 2) {
          out << "<line x1=\"" << num(f.px(px[h])) << "\" y1=\"" << num(f.py(py[h])) << "\" x2=\""
              << num(f.px(px[h + 1])) << "\" y2=\"" << num(f.py(py[h + 1])) << "\"/>\n";
        }
      }
    }
  }
  out << "</g>\n";

  std::vector<std::string> names;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    polyline(out, f, paths[i], color(i));
    names.push_back(paths[i].name);
  }
  legend(out, names);
  out << "</svg>\n";
  return out.str();
}

}  // namespace aniso::lab
