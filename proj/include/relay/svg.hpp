#pragma once

#include <string>
#include <vector>

namespace relay {

struct Series {
  std::string name;
  std::vector<double> xs;
  std::vector<double> ys;  // NaN entries break the polyline
  std::string color = "#1f77b4";
};

// Fixed-size (800x500) line chart. Self-contained SVG, no external assets.
std::string line_chart(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel,
                       const std::vector<Series>& series);

}  // namespace relay
