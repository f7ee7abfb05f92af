#include "mascot/eval/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "mascot/numerics/errors.hpp"

namespace mascot::eval {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::vector<Series>& series, const std::string& x_label) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!(x0 <= x1)) throw InputError("line chart '" + title + "': no data");
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double W = 640, H = 360, L = 60, R = 150, T = 36, B = 44;
  const double pw = W - L - R, ph = H - T - B;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return T + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fy = y0 + (y1 - y0) * k / 4.0, fx = x0 + (x1 - x0) * k / 4.0;
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    o << "<text x=\"" << px(fx) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 8 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(series[s].x.size(), series[s].y.size()); ++i)
      if (std::isfinite(series[s].x[i]) && std::isfinite(series[s].y[i]))
        o << num(px(series[s].x[i])) << ',' << num(py(series[s].y[i])) << ' ';
    o << "\"/>\n";
    const double ly = T + 14.0 * static_cast<double>(s) + 8;
    o << "<line x1=\"" << L + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 28 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + pw + 32 << "\" y=\"" << ly + 4 << "\">" << escape(series[s].name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string heatmap_svg(const std::string& title, const std::vector<double>& values, std::size_t rows, std::size_t cols,
                        const std::vector<std::size_t>& outlined) {
  if (rows == 0 || cols == 0 || values.size() != rows * cols) throw InputError("heatmap: values do not fill the grid");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it, span = *hi_it > *lo_it ? *hi_it - *lo_it : 1.0;
  const double cell = 28, top = 30, left = 10;
  const std::set<std::size_t> marked(outlined.begin(), outlined.end());
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left * 2 + cell * static_cast<double>(cols) << "\" height=\""
    << top + 10 + cell * static_cast<double>(rows) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<text x=\"" << left << "\" y=\"18\">" << escape(title) << "</text>\n";
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      const int level = static_cast<int>(std::lround(255.0 * (values[i] - lo) / span));
      o << "<rect x=\"" << left + cell * static_cast<double>(c) << "\" y=\"" << top + cell * static_cast<double>(r)
        << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << level << ',' << level / 3 << ','
        << 255 - level << ")\"";
      if (marked.count(i)) o << " stroke=\"black\" stroke-width=\"3\"";
      o << "><title>" << i << ": " << num(values[i]) << "</title></rect>\n";
    }
  o << "</svg>\n";
  return o.str();
}

}  // namespace mascot::eval
