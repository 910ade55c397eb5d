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

#ifndef TARMA__CORE_HPP_
#define TARMA__CORE_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "tarma/error.hpp"

namespace tarma
{

/// Calendar metadata carried alongside a series; never interpreted.
struct SeriesMeta
{
  std::string start;   // e.g. "1949-01"
  int frequency = 12;  // observations per year

  bool operator==(const SeriesMeta &) const = default;
};

/// Ordered, finite, non-empty sample X_1..X_n.
class TimeSeries
{
public:
  TimeSeries() = default;

  explicit TimeSeries(std::vector<double> values, std::optional<SeriesMeta> meta = std::nullopt)
  : values_(std::move(values)), meta_(std::move(meta))
  {
    if (values_.empty()) {
      throw DataError("time series must contain at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw DataError("time series value at index " + std::to_string(i) + " is not finite");
      }
    }
    if (meta_ && meta_->frequency <= 0) {
      throw DataError("series frequency must be positive");
    }
  }

  std::size_t size() const noexcept {return values_.size();}
  double operator[](std::size_t i) const noexcept {return values_[i];}
  std::span<const double> values() const noexcept {return values_;}
  const std::vector<double> & vector() const noexcept {return values_;}
  const std::optional<SeriesMeta> & meta() const noexcept {return meta_;}

  bool operator==(const TimeSeries &) const = default;

private:
  std::vector<double> values_;
  std::optional<SeriesMeta> meta_;
};

/// Null-model parameters lambda = (phi, theta, a, b).
///
/// Mean equation uses the subtracted MA convention
///   X_t = phi_0 + sum phi_i X_{t-i} - sum theta_j eps_{t-j} + eps_t,
/// variance equation h_t = a_0 + sum a_i eps_{t-i}^2 + sum b_j h_{t-j}.
struct ArmaGarchParams
{
  std::vector<double> phi{0.0};  // phi_0 first
  std::vector<double> theta;
  std::vector<double> a{1.0};    // a_0 first
  std::vector<double> b;

  int p() const noexcept {return static_cast<int>(phi.size()) - 1;}
  int q() const noexcept {return static_cast<int>(theta.size());}
  int u() const noexcept {return static_cast<int>(a.size()) - 1;}
  int v() const noexcept {return static_cast<int>(b.size());}

  /// Sum of ARCH and GARCH coefficients (excluding a_0).
  double persistence() const noexcept
  {
    double s = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) {s += a[i];}
    for (double bj : b) {s += bj;}
    return s;
  }

  /// Positivity of every variance coefficient and persistence below one.
  bool variance_admissible() const noexcept
  {
    if (a.empty() || !(a[0] > 0.0)) {return false;}
    for (std::size_t i = 1; i < a.size(); ++i) {
      if (!(a[i] > 0.0)) {return false;}
    }
    for (double bj : b) {
      if (!(bj > 0.0)) {return false;}
    }
    return persistence() < 1.0;
  }

  void validate_shape() const
  {
    if (phi.empty()) {throw std::invalid_argument("phi must contain the intercept phi_0");}
    if (a.empty()) {throw std::invalid_argument("a must contain a_0");}
  }

  bool operator==(const ArmaGarchParams &) const = default;
};

/// Alternative-model parameters: lambda plus the second-regime increment Psi_2,
/// threshold r and delay d. The increment applies when X_{t-d} <= r.
struct TarmaGarchParams
{
  ArmaGarchParams base;
  std::vector<double> psi2;  // (varphi_0..varphi_p, vartheta_1..vartheta_q)
  double r = 0.0;
  int d = 1;

  void validate_shape() const
  {
    base.validate_shape();
    const auto expected = static_cast<std::size_t>(base.p() + base.q() + 1);
    if (psi2.size() != expected) {
      throw std::invalid_argument(
              "psi2 must have p+q+1 = " + std::to_string(expected) + " entries, got " +
              std::to_string(psi2.size()));
    }
    if (d < 1) {throw std::invalid_argument("delay d must be >= 1");}
  }

  bool operator==(const TarmaGarchParams &) const = default;
};

/// Threshold candidates searched by the sup statistic.
struct ThresholdGrid
{
  std::vector<double> candidates;
  double lower_q = 0.25;
  double upper_q = 0.75;
  double pi0 = 0.25;

  /// Grid from explicit candidates; used for single-point and custom grids.
  static ThresholdGrid from_candidates(
    std::vector<double> candidates, double lower_q = 0.25, double upper_q = 0.75)
  {
    if (candidates.empty()) {throw DataError("threshold grid is empty");}
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (!(candidates[i] > candidates[i - 1])) {
        throw DataError("threshold candidates must be strictly increasing");
      }
    }
    return ThresholdGrid{std::move(candidates), lower_q, upper_q, lower_q};
  }

  bool operator==(const ThresholdGrid &) const = default;
};

namespace detail
{

inline std::string_view trim(std::string_view s)
{
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) {return {};}
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line)
{
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

/// Parses a complete cell as a finite double; nullopt otherwise.
inline std::optional<double> parse_number(std::string_view cell)
{
  if (cell.empty()) {return std::nullopt;}
  if (cell.front() == '+') {cell.remove_prefix(1);}
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

inline std::string format_double(double x)
{
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Column selector for load_series: header name or zero-based index.
using ColumnSelector = std::variant<std::size_t, std::string>;

/// Reads one numeric column of a CSV file. A first row is treated as a header
/// when any of its cells is non-numeric. Missing or non-numeric cells below the
/// header are errors.
inline TimeSeries load_series(const std::string & path, const ColumnSelector & column = std::size_t{0})
{
  std::ifstream in(path);
  if (!in) {throw DataError("cannot open series file: " + path);}

  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> col_index;
  if (const auto * idx = std::get_if<std::size_t>(&column)) {col_index = *idx;}

  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) {continue;}
    const auto cells = detail::split_csv_line(line);

    if (first_content_row) {
      first_content_row = false;
      const bool is_header = std::any_of(
        cells.begin(), cells.end(), [](std::string_view c) {return !detail::parse_number(c);});
      const bool looks_numeric_but_bad = is_header && std::all_of(
        cells.begin(), cells.end(), [](std::string_view c) {
          double tmp;
          auto res = std::from_chars(c.data(), c.data() + c.size(), tmp);
          return res.ec == std::errc{} && res.ptr == c.data() + c.size();
        });
      if (is_header && !looks_numeric_but_bad) {
        if (const auto * name = std::get_if<std::string>(&column)) {
          const auto it = std::find(cells.begin(), cells.end(), std::string_view(*name));
          if (it == cells.end()) {
            throw DataError("column '" + *name + "' not found in header of " + path);
          }
          col_index = static_cast<std::size_t>(std::distance(cells.begin(), it));
        }
        continue;
      }
    }

    if (!col_index) {
      throw DataError("column selected by name but " + path + " has no header row");
    }
    if (*col_index >= cells.size() || cells[*col_index].empty()) {
      throw DataError("missing value at line " + std::to_string(line_no) + " of " + path);
    }
    const auto v = detail::parse_number(cells[*col_index]);
    if (!v) {
      throw DataError(
              "non-numeric cell '" + std::string(cells[*col_index]) + "' at line " +
              std::to_string(line_no) + " of " + path);
    }
    values.push_back(*v);
  }
  if (values.empty()) {throw DataError("no values read from " + path);}
  return TimeSeries(std::move(values));
}

/// Canonical single-column CSV: optional header, shortest round-trip decimals.
inline void write_series(std::ostream & out, const TimeSeries & series,
  const std::optional<std::string> & header = std::nullopt)
{
  if (header) {out << *header << '\n';}
  for (double v : series.values()) {out << detail::format_double(v) << '\n';}
}

inline void write_series(const std::string & path, const TimeSeries & series,
  const std::optional<std::string> & header = std::nullopt)
{
  std::ofstream out(path);
  if (!out) {throw DataError("cannot write series file: " + path);}
  write_series(out, series, header);
}

inline TimeSeries log10_transform(const TimeSeries & series)
{
  std::vector<double> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!(series[i] > 0.0)) {
      throw DataError("log10 transform requires positive values; index " + std::to_string(i));
    }
    out.push_back(std::log10(series[i]));
  }
  return TimeSeries(std::move(out), series.meta());
}

/// Order statistics x_(i) with ceil(lower_q n) <= i <= floor(upper_q n), distinct,
/// strictly below max(X), thinned to max_points evenly spaced entries.
inline ThresholdGrid percentile_grid(
  const TimeSeries & series, double lower_q, double upper_q, std::size_t max_points = 200)
{
  if (!(lower_q > 0.0 && lower_q < upper_q && upper_q < 1.0)) {
    throw std::invalid_argument("percentile grid requires 0 < lower_q < upper_q < 1");
  }
  if (series.size() < 4) {throw DataError("percentile grid requires at least 4 observations");}
  if (max_points == 0) {throw std::invalid_argument("max_points must be positive");}

  std::vector<double> sorted(series.values().begin(), series.values().end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Tolerance keeps products like 0.3*10 from landing on the wrong integer.
  const auto lo = static_cast<std::size_t>(std::max(1.0, std::ceil(lower_q * n - 1e-9)));
  const auto hi = static_cast<std::size_t>(std::min(n, std::floor(upper_q * n + 1e-9)));
  const double max_x = sorted.back();

  std::vector<double> distinct;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double x = sorted[i - 1];
    if (x >= max_x) {break;}
    if (distinct.empty() || x > distinct.back()) {distinct.push_back(x);}
  }
  if (distinct.empty()) {
    throw DataError("threshold grid is empty (degenerate series)");
  }

  std::vector<double> candidates;
  if (distinct.size() <= max_points) {
    candidates = std::move(distinct);
  } else if (max_points == 1) {
    candidates = {distinct.front()};
  } else {
    const double step = static_cast<double>(distinct.size() - 1) /
      static_cast<double>(max_points - 1);
    for (std::size_t k = 0; k < max_points; ++k) {
      const auto idx = static_cast<std::size_t>(std::llround(static_cast<double>(k) * step));
      if (candidates.empty() || distinct[idx] > candidates.back()) {
        candidates.push_back(distinct[idx]);
      }
    }
  }
  return ThresholdGrid{std::move(candidates), lower_q, upper_q, lower_q};
}

}  // namespace tarma

#endif  // TARMA__CORE_HPP_
