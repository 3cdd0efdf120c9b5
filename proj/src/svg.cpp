// Copyright 2026 The fdmcar Authors
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
#include "fdmcar/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "fdmcar/error.hpp"

namespace fdmcar {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                "#9467bd", "#ff7f0e", "#17becf"};

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

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const {
    return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

Frame padded(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.05 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad};
}

void open_svg(std::ostringstream& s) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
    << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
    << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& s, const Frame& f, const std::string& xlabel,
          const std::string& ylabel) {
  const double left = kLeft;
  const double right = kWidth - kRight;
  const double top = kTop;
  const double bottom = kHeight - kBottom;
  s << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
    << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
    << num(right - left) << "\" height=\"" << num(bottom - top) << "\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    s << "<line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(bottom)
      << "\" x2=\"" << num(f.px(x)) << "\" y2=\"" << num(bottom + 5) << "\"/>\n"
      << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(f.py(y))
      << "\" x2=\"" << num(left) << "\" y2=\"" << num(f.py(y)) << "\"/>\n";
  }
  s << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double y = f.y0 + (f.y1 - f.y0) * k / 4.0;
    s << "<text x=\"" << num(f.px(x)) << "\" y=\"" << num(bottom + 18)
      << "\" text-anchor=\"middle\">" << tick(x) << "</text>\n"
      << "<text x=\"" << num(left - 8) << "\" y=\"" << num(f.py(y) + 4)
      << "\" text-anchor=\"end\">" << tick(y) << "</text>\n";
  }
  s << "<text x=\"" << num((left + right) / 2) << "\" y=\""
    << num(kHeight - 10) << "\" text-anchor=\"middle\">" << xlabel
    << "</text>\n"
    << "<text x=\"14\" y=\"" << num((top + bottom) / 2)
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
    << num((top + bottom) / 2) << ")\">" << ylabel << "</text>\n</g>\n";
}

std::string polyline_points(const Frame& f, std::span<const double> x,
                            std::span<const double> y) {
  std::string pts;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k) pts += ' ';
    pts += num(f.px(x[k])) + ',' + num(f.py(y[k]));
  }
  return pts;
}

}  // namespace

std::string band_svg(const ConfidenceBand& band) {
  if (band.center.empty() || band.center.size() != band.coordinates.size()) {
    throw InputError("band has no points to plot");
  }
  const auto& t = band.coordinates;
  std::vector<double> lower(t.size());
  std::vector<double> upper(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    lower[j] = band.center[j] - band.half_width;
    upper[j] = band.center[j] + band.half_width;
  }
  const double lo = std::min(0.0, *std::min_element(lower.begin(), lower.end()));
  const double hi = std::max(0.0, *std::max_element(upper.begin(), upper.end()));
  const Frame f = padded(t.front(), t.back(), lo, hi);

  std::ostringstream s;
  open_svg(s);
  std::vector<double> ring_x(t.begin(), t.end());
  std::vector<double> ring_y(upper);
  for (std::size_t j = t.size(); j-- > 0;) {
    ring_x.push_back(t[j]);
    ring_y.push_back(lower[j]);
  }
  s << "<polygon points=\"" << polyline_points(f, ring_x, ring_y)
    << "\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"#1f77b4\""
       " stroke-dasharray=\"4 3\"/>\n";
  s << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(0.0))
    << "\" x2=\"" << num(f.px(f.x1)) << "\" y2=\"" << num(f.py(0.0))
    << "\" stroke=\"gray\" stroke-width=\"1\"/>\n";
  s << "<polyline points=\"" << polyline_points(f, t, band.center)
    << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  axes(s, f, "t", "mu_A - mu_B");
  s << "</svg>\n";
  return s.str();
}

std::string power_svg(std::span<const RejectionTable> curves) {
  if (curves.empty() || curves.front().cells.empty()) {
    throw InputError("no rejection rates to plot");
  }
  std::vector<double> bs;
  for (const auto& c : curves) bs.push_back(c.b);
  const double alpha = curves.front().alpha;
  const Frame f{bs.front(), bs.size() > 1 ? bs.back() : bs.front() + 1.0, 0.0, 1.0};

  std::ostringstream s;
  open_svg(s);
  s << "<line x1=\"" << num(f.px(f.x0)) << "\" y1=\"" << num(f.py(alpha))
    << "\" x2=\"" << num(f.px(f.x1)) << "\" y2=\"" << num(f.py(alpha))
    << "\" stroke=\"gray\" stroke-dasharray=\"5 4\"/>\n";
  const auto& cells = curves.front().cells;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::vector<double> rate;
    for (const auto& c : curves) rate.push_back(c.cells[k].rate());
    const char* color = kPalette[k % std::size(kPalette)];
    s << "<polyline points=\"" << polyline_points(f, bs, rate)
      << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    for (std::size_t i = 0; i < bs.size(); ++i) {
      s << "<circle cx=\"" << num(f.px(bs[i])) << "\" cy=\"" << num(f.py(rate[i]))
        << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 14.0 + 14.0 * static_cast<double>(k);
    s << "<text x=\"" << num(kLeft + 10) << "\" y=\"" << num(ly)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
      << "\">" << to_string(cells[k].method) << ' '
      << to_string(cells[k].calibration) << "</text>\n";
  }
  axes(s, f, "b", "rejection rate");
  s << "</svg>\n";
  return s.str();
}

}  // namespace fdmcar
