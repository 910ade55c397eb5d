// Copyright 2026 The tarmagarch Authors
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

#ifndef TARMA__SVG_HPP_
#define TARMA__SVG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace tarma::svg
{

struct LineSeries
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct BoxGroup
{
  std::string label;
  std::vector<double> values;
};

namespace detail
{

inline constexpr const char * kPalette[] = {
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

inline std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string escape(const std::string & s)
{
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

struct Frame
{
  double w = 640, h = 400, left = 60, right = 170, top = 40, bottom = 50;
  double x0, x1, y0, y1;

  double px(double x) const {return left + (x - x0) / (x1 - x0) * (w - left - right);}
  double py(double y) const {return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);}
};

inline void axes(std::ostringstream & os, const Frame & f, const std::string & title,
  const std::string & xlabel, const std::string & ylabel, bool x_ticks = true)
{
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.w << "\" height=\"" << f.h
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << f.w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n";
  const double xl = f.left, xr = f.w - f.right, yb = f.h - f.bottom, yt = f.top;
  os << "<line x1=\"" << xl << "\" y1=\"" << yb << "\" x2=\"" << xr << "\" y2=\"" << yb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << xl << "\" y1=\"" << yb << "\" x2=\"" << xl << "\" y2=\"" << yt << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << xl - 6 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">"
       << num(yv) << "</text>\n";
    if (x_ticks) {
      const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
      os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << yb + 16 << "\" text-anchor=\"middle\">"
         << num(xv) << "</text>\n";
    }
  }
  os << "<text x=\"" << (xl + xr) / 2 << "\" y=\"" << f.h - 12 << "\" text-anchor=\"middle\">"
     << escape(xlabel) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (yt + yb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (yt + yb) / 2 << ")\">" << escape(ylabel) << "</text>\n";
}

}  // namespace detail

inline std::string line_chart(
  const std::string & title, const std::vector<LineSeries> & series, const std::string & xlabel,
  const std::string & ylabel)
{
  detail::Frame f;
  f.x0 = f.y0 = std::numeric_limits<double>::infinity();
  f.x1 = f.y1 = -std::numeric_limits<double>::infinity();
  for (const auto & s : series) {
    for (double v : s.x) {f.x0 = std::min(f.x0, v); f.x1 = std::max(f.x1, v);}
    for (double v : s.y) {f.y0 = std::min(f.y0, v); f.y1 = std::max(f.y1, v);}
  }
  if (!std::isfinite(f.x0)) {f.x0 = 0; f.x1 = 1; f.y0 = 0; f.y1 = 1;}
  if (f.x1 == f.x0) {f.x1 = f.x0 + 1;}
  f.y0 = std::min(f.y0, 0.0);
  if (f.y1 <= f.y0) {f.y1 = f.y0 + 1;}
  std::ostringstream os;
  detail::axes(os, f, title, xlabel, ylabel);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto & s = series[i];
    const char * col = detail::kPalette[i % 8];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      os << detail::num(f.px(s.x[k])) << ',' << detail::num(f.py(s.y[k])) << ' ';
    }
    os << "\"/>\n";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      os << "<circle cx=\"" << detail::num(f.px(s.x[k])) << "\" cy=\"" << detail::num(f.py(s.y[k]))
         << "\" r=\"3\" fill=\"" << col << "\"/>\n";
    }
    const double ly = f.top + 16 + 18 * static_cast<double>(i);
    os << "<rect x=\"" << f.w - f.right + 12 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"12\" fill=\""
       << col << "\"/>\n";
    os << "<text x=\"" << f.w - f.right + 30 << "\" y=\"" << ly + 1 << "\">" << detail::escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

/// Box plot with whiskers at the extremes.
inline std::string box_chart(
  const std::string & title, const std::vector<BoxGroup> & groups, const std::string & ylabel)
{
  detail::Frame f;
  f.right = 30;
  f.bottom = 70;
  f.x0 = 0;
  f.x1 = static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  f.y0 = 0;
  f.y1 = 1;
  for (const auto & g : groups) {
    for (double v : g.values) {f.y1 = std::max(f.y1, v);}
  }
  std::ostringstream os;
  detail::axes(os, f, title, "", ylabel, false);
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto v = groups[i].values;
    if (v.empty()) {continue;}
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
      };
    const double cx = f.px(static_cast<double>(i) + 0.5);
    const double bw = 0.3 * (f.px(1) - f.px(0));
    const char * col = detail::kPalette[i % 8];
    os << "<line x1=\"" << detail::num(cx) << "\" y1=\"" << detail::num(f.py(v.front())) << "\" x2=\""
       << detail::num(cx) << "\" y2=\"" << detail::num(f.py(v.back())) << "\" stroke=\"black\"/>\n";
    os << "<rect x=\"" << detail::num(cx - bw / 2) << "\" y=\"" << detail::num(f.py(q(0.75)))
       << "\" width=\"" << detail::num(bw) << "\" height=\"" << detail::num(f.py(q(0.25)) - f.py(q(0.75)))
       << "\" fill=\"" << col << "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << detail::num(cx - bw / 2) << "\" y1=\"" << detail::num(f.py(q(0.5))) << "\" x2=\""
       << detail::num(cx + bw / 2) << "\" y2=\"" << detail::num(f.py(q(0.5)))
       << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << detail::num(cx) << "\" y=\"" << f.h - f.bottom + 18
       << "\" text-anchor=\"middle\">" << detail::escape(groups[i].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace tarma::svg

#endif  // TARMA__SVG_HPP_
