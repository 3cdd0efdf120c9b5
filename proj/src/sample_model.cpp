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
#include "fdmcar/sample_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fdmcar/error.hpp"

namespace fdmcar {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool parse_finite(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         std::isfinite(out);
}

}  // namespace

Grid Grid::equispaced(std::size_t p) {
  if (p < 1) throw InputError("grid needs at least one point");
  std::vector<double> points(p);
  for (std::size_t j = 0; j < p; ++j) {
    points[j] = static_cast<double>(j + 1) / static_cast<double>(p);
  }
  return Grid(std::move(points), 1.0 / static_cast<double>(p));
}

Grid Grid::from_points(std::vector<double> points) {
  if (points.size() < 2) throw InputError("grid needs at least two points");
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (!(points[j] >= 0.0 && points[j] <= 1.0)) {
      throw InputError("grid coordinate " + format_double(points[j]) +
                           " outside [0, 1]; rescale the domain first",
                       std::nullopt, j + 1);
    }
    if (j > 0 && !(points[j] > points[j - 1])) {
      throw InputError("grid coordinates must be strictly increasing",
                       std::nullopt, j + 1);
    }
  }
  const double spacing = (points.back() - points.front()) /
                         static_cast<double>(points.size() - 1);
  return Grid(std::move(points), spacing);
}

FunctionalSample::FunctionalSample(Grid grid, Matrix values, MaskMatrix mask)
    : grid_(std::move(grid)), values_(std::move(values)), mask_(std::move(mask)) {
  if (values_.rows() != mask_.rows() || values_.cols() != mask_.cols()) {
    throw InputError("value matrix and mask differ in shape");
  }
  if (values_.cols() != grid_.size()) {
    throw InputError("value matrix has " + std::to_string(values_.cols()) +
                     " columns but the grid has " +
                     std::to_string(grid_.size()) + " points");
  }
  if (values_.rows() < 2 || values_.cols() < 2) {
    throw InputError("need at least 2 curves and 2 grid points, got " +
                     std::to_string(values_.rows()) + "x" +
                     std::to_string(values_.cols()));
  }
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    for (std::size_t j = 0; j < values_.cols(); ++j) {
      if (mask_(i, j) > 1) {
        throw InputError("mask entries must be 0 or 1", i + 1, j + 1);
      }
      if (mask_(i, j) == 0) {
        values_(i, j) = kMissingValue;
      } else if (!std::isfinite(values_(i, j))) {
        throw InputError("observed value is not finite", i + 1, j + 1);
      }
    }
  }
}

FunctionalSample read_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::size_t> line_numbers;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);

  for (std::size_t k = 0; k < lines.size(); ++k) {
    if (trim(lines[k]).empty()) continue;
    rows.push_back(split_cells(lines[k]));
    line_numbers.push_back(k + 1);
  }
  if (rows.empty()) throw InputError("empty CSV input");

  const std::size_t p = rows.front().size();
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != p) {
      throw InputError("ragged row " + std::to_string(line_numbers[r]) +
                           ": expected " + std::to_string(p) + " cells, got " +
                           std::to_string(rows[r].size()),
                       line_numbers[r]);
    }
  }

  std::size_t first_data = 0;
  std::vector<double> coordinates;
  if (options.header) {
    for (std::size_t j = 0; j < p; ++j) {
      double t = 0.0;
      if (!parse_finite(rows[0][j], t)) {
        throw InputError("header cell at row " +
                             std::to_string(line_numbers[0]) + ", column " +
                             std::to_string(j + 1) + " is not a number",
                         line_numbers[0], j + 1);
      }
      coordinates.push_back(t);
    }
    first_data = 1;
  }

  const std::size_t n = rows.size() - first_data;
  if (n < 2 || p < 2) {
    throw InputError("need at least 2 curves and 2 grid points, got " +
                     std::to_string(n) + "x" + std::to_string(p));
  }

  Matrix values(n, p, kMissingValue);
  MaskMatrix mask(n, p, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cells = rows[first_data + i];
    for (std::size_t j = 0; j < p; ++j) {
      const std::string_view cell = cells[j];
      if (cell.empty() || cell == options.missing_token) continue;
      double v = 0.0;
      if (!parse_finite(cell, v)) {
        const std::size_t row = line_numbers[first_data + i];
        throw InputError("cannot parse '" + std::string(cell) + "' at row " +
                             std::to_string(row) + ", column " +
                             std::to_string(j + 1),
                         row, j + 1);
      }
      values(i, j) = v;
      mask(i, j) = 1;
    }
  }

  Grid grid = options.header ? Grid::from_points(std::move(coordinates))
                             : Grid::equispaced(p);
  return FunctionalSample(std::move(grid), std::move(values), std::move(mask));
}

FunctionalSample load_csv(const std::filesystem::path& path,
                          const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_csv(in, options);
}

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

void write_csv(std::ostream& out, const FunctionalSample& sample,
               std::string_view missing_token) {
  const std::size_t p = sample.points();
  for (std::size_t j = 0; j < p; ++j) {
    if (j) out << ',';
    out << format_double(sample.grid()[j]);
  }
  out << '\n';
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      if (j) out << ',';
      if (sample.observed(i, j)) {
        out << format_double(sample.value(i, j));
      } else {
        out << missing_token;
      }
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path,
               const FunctionalSample& sample, std::string_view missing_token) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_csv(out, sample, missing_token);
  if (!out) throw InputError("write failed for " + path.string());
}

double observed_measure(const FunctionalSample& sample, std::size_t i) {
  if (i >= sample.size()) {
    throw InputError("curve index " + std::to_string(i) + " out of range [0, " +
                     std::to_string(sample.size()) + ")");
  }
  std::size_t count = 0;
  for (std::uint8_t o : sample.mask().row(i)) count += o;
  return static_cast<double>(count) / static_cast<double>(sample.points());
}

SubdomainIndex restrict_domain(const FunctionalSample& sample,
                               const GroupLabels& labels, double threshold) {
  if (labels.size() != sample.size()) {
    throw InputError("labels cover " + std::to_string(labels.size()) +
                     " curves, sample has " + std::to_string(sample.size()));
  }
  if (!(threshold >= 0.0 && threshold < 1.0)) {
    throw InputError("coverage threshold must lie in [0, 1)");
  }
  const std::size_t n = sample.size();
  const double needed = static_cast<double>(n) * threshold;

  SubdomainIndex index;
  index.coverage_fraction = threshold;
  std::size_t best = 0;
  for (std::size_t j = 0; j < sample.points(); ++j) {
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      count[static_cast<int>(labels[i])] += sample.mask()(i, j);
    }
    const std::size_t least = std::min(count[0], count[1]);
    best = std::max(best, least);
    if (static_cast<double>(least) > needed) index.kept.push_back(j);
  }
  if (index.kept.empty()) {
    std::ostringstream msg;
    msg << "no testable subdomain: the largest per-column minimum group count "
        << "is " << best << ", but more than " << format_double(needed)
        << " (n * " << format_double(threshold) << ") is required";
    throw ValidationError("no_testable_subdomain", msg.str());
  }
  return index;
}

}  // namespace fdmcar
