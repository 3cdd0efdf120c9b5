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
#ifndef FDMCAR_PARTITION_HPP_
#define FDMCAR_PARTITION_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdmcar/labels.hpp"
#include "fdmcar/sample_model.hpp"

namespace fdmcar {

// A = fully observed curves, B = everything else.
GroupLabels partition_complete(const FunctionalSample& sample);

// A = curves whose observed measure is at least delta (inclusive).
GroupLabels partition_by_measure(const FunctionalSample& sample, double delta);

// One label per line ("A" or "B"). Nothing here can check that the labels are
// a function of the observation pattern alone; that is the caller's promise.
GroupLabels read_labels(std::istream& in, std::size_t n,
                        const std::string& source = "stream");
GroupLabels load_labels(const std::filesystem::path& path, std::size_t n);

struct ValidationReport {
  bool passed = false;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  // Observed counts per kept column, in subdomain order.
  std::vector<std::size_t> count_a;
  std::vector<std::size_t> count_b;
  std::size_t min_count_a = 0;
  std::size_t min_count_b = 0;
  // Grid column index of the first kept column empty in some group.
  std::optional<std::size_t> failing_column;
  std::string message;
};

// Empirical check of the partition assumptions over the kept columns: both
// groups non-empty and each observed at least once at every kept column.
ValidationReport validate_assumption(const FunctionalSample& sample,
                                     const GroupLabels& labels,
                                     const SubdomainIndex& subdomain);

}  // namespace fdmcar

#endif  // FDMCAR_PARTITION_HPP_
