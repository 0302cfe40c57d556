// Copyright 2026 The uhdiqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uhdiqa/csv.hpp"

namespace uhdiqa::svg {

/// Minimal fixed-layout plot: optional scatter points plus polylines on
/// shared axes.
struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
  std::vector<std::vector<std::pair<double, double>>> lines;
};

inline void write(std::ostream& out, const Plot& plot) {
  constexpr double W = 640, H = 480, L = 60, R = 20, T = 40, B = 50;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  auto extend = [&](double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  for (const auto& [x, y] : plot.points) extend(x, y);
  for (const auto& l : plot.lines)
    for (const auto& [x, y] : l) extend(x, y);
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) { y0 -= 0.5; y1 += 0.5; }
  auto sx = [&](double x) { return csv::format_double(L + (x - x0) / (x1 - x0) * (W - L - R)); };
  auto sy = [&](double y) { return csv::format_double(H - B - (y - y0) / (y1 - y0) * (H - T - B)); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  out << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  out << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << plot.title << "</text>\n";
  out << "<line x1=\"60\" y1=\"430\" x2=\"620\" y2=\"430\" stroke=\"black\"/>\n";
  out << "<line x1=\"60\" y1=\"40\" x2=\"60\" y2=\"430\" stroke=\"black\"/>\n";
  out << "<text x=\"340\" y=\"470\" text-anchor=\"middle\" font-size=\"12\">" << plot.x_label << " ["
      << csv::format_double(x0) << ", " << csv::format_double(x1) << "]</text>\n";
  out << "<text x=\"16\" y=\"235\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 235)\">"
      << plot.y_label << " [" << csv::format_double(y0) << ", " << csv::format_double(y1) << "]</text>\n";
  for (const auto& [x, y] : plot.points)
    out << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"2\" fill=\"#5b2a86\" fill-opacity=\"0.5\"/>\n";
  for (const auto& l : plot.lines) {
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < l.size(); ++i) out << (i ? " " : "") << sx(l[i].first) << ',' << sy(l[i].second);
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace uhdiqa::svg
