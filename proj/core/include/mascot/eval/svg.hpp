#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mascot::eval {

struct Series {
  std::string name;
  std::vector<double> x, y;
};

/// Self-contained SVG line chart; non-finite points are skipped.
/// Throws InputError when no series has a point.
std::string line_chart_svg(const std::string& title, const std::vector<Series>& series, const std::string& x_label = "step");

/// Grid heatmap of `values` (rows × cols, row-major); cells listed in
/// `outlined` get a heavy border.
std::string heatmap_svg(const std::string& title, const std::vector<double>& values, std::size_t rows, std::size_t cols,
                        const std::vector<std::size_t>& outlined = {});

}  // namespace mascot::eval
