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
#ifndef FDMCAR_SAMPLE_MODEL_HPP_
#define FDMCAR_SAMPLE_MODEL_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdmcar/labels.hpp"
#include "fdmcar/matrix.hpp"

namespace fdmcar {

// Stored in the value matrix wherever the mask is 0. Never read.
inline constexpr double kMissingValue = std::numeric_limits<double>::quiet_NaN();

// Ordered evaluation points in [0, 1]. `spacing` is the quadrature weight
// used for every Riemann sum over the grid.
class Grid {
 public:
  // t_j = j / p for j = 1..p.
  static Grid equispaced(std::size_t p);

  // Strictly increasing points in [0, 1]; spacing is the mean gap.
  static Grid from_points(std::vector<double> points);

  std::size_t size() const noexcept { return points_.size(); }
  std::span<const double> points() const noexcept { return points_; }
  double operator[](std::size_t j) const noexcept { return points_[j]; }
  double spacing() const noexcept { return spacing_; }

  bool operator==(const Grid&) const = default;

 private:
  Grid(std::vector<double> points, double spacing)
      : points_(std::move(points)), spacing_(spacing) {}

  std::vector<double> points_;
  double spacing_ = 0.0;
};

// n curves on a common grid with a binary observation mask. The mask is
// authoritative; values under mask 0 are normalized to kMissingValue.
class FunctionalSample {
 public:
  FunctionalSample(Grid grid, Matrix values, MaskMatrix mask);

  const Grid& grid() const noexcept { return grid_; }
  const Matrix& values() const noexcept { return values_; }
  const MaskMatrix& mask() const noexcept { return mask_; }

  std::size_t size() const noexcept { return values_.rows(); }
  std::size_t points() const noexcept { return values_.cols(); }

  bool observed(std::size_t i, std::size_t j) const noexcept {
    return mask_(i, j) != 0;
  }
  double value(std::size_t i, std::size_t j) const noexcept {
    return values_(i, j);
  }

 private:
  Grid grid_;
  Matrix values_;
  MaskMatrix mask_;
};

// Grid columns on which both groups are observed often enough to test.
struct SubdomainIndex {
  std::vector<std::size_t> kept;
  double coverage_fraction = 0.1;
};

struct CsvOptions {
  std::string missing_token = "NA";
  bool header = false;  // first row holds the grid coordinates
};

FunctionalSample read_csv(std::istream& in, const CsvOptions& options = {});
FunctionalSample load_csv(const std::filesystem::path& path,
                          const CsvOptions& options = {});

// Always writes the grid header row, so the output reloads with
// CsvOptions::header = true to a bit-identical sample.
void write_csv(std::ostream& out, const FunctionalSample& sample,
               std::string_view missing_token = "NA");
void write_csv(const std::filesystem::path& path,
               const FunctionalSample& sample,
               std::string_view missing_token = "NA");

// Fraction of grid points at which curve i is observed.
double observed_measure(const FunctionalSample& sample, std::size_t i);

// Keeps column j iff min over groups of the observed count at j exceeds
// n * threshold. Throws ValidationError("no_testable_subdomain") when
// nothing survives.
SubdomainIndex restrict_domain(const FunctionalSample& sample,
                               const GroupLabels& labels,
                               double threshold = 0.1);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace fdmcar

#endif  // FDMCAR_SAMPLE_MODEL_HPP_
