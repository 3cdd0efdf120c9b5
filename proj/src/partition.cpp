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
#include "fdmcar/partition.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "fdmcar/error.hpp"

namespace fdmcar {

std::string PartitionRule::describe() const {
  switch (kind) {
    case Kind::Complete:
      return "complete";
    case Kind::Measure:
      return "measure:" + format_double(delta);
    case Kind::External:
      return "file:" + source;
  }
  return "unknown";
}

namespace {

void require_both_groups(const GroupLabels& labels) {
  const std::size_t n_a = labels.count(Group::A);
  const std::size_t n_b = labels.count(Group::B);
  if (n_a == 0 || n_b == 0) {
    throw ValidationError(
        "assumption_violation",
        "partition '" + labels.rule().describe() + "' leaves group " +
            (n_a == 0 ? "A" : "B") + " empty (n_A = " + std::to_string(n_a) +
            ", n_B = " + std::to_string(n_b) + ")");
  }
}

}  // namespace

GroupLabels partition_complete(const FunctionalSample& sample) {
  std::vector<Group> labels(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto row = sample.mask().row(i);
    const bool complete =
        std::all_of(row.begin(), row.end(), [](std::uint8_t o) { return o == 1; });
    labels[i] = complete ? Group::A : Group::B;
  }
  GroupLabels result(std::move(labels), PartitionRule{});
  require_both_groups(result);
  return result;
}

GroupLabels partition_by_measure(const FunctionalSample& sample, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InputError("measure threshold delta must lie in (0, 1]");
  }
  std::vector<Group> labels(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    labels[i] = observed_measure(sample, i) >= delta ? Group::A : Group::B;
  }
  GroupLabels result(std::move(labels),
                     PartitionRule{PartitionRule::Kind::Measure, delta, {}});
  require_both_groups(result);
  return result;
}

GroupLabels read_labels(std::istream& in, std::size_t n,
                        const std::string& source) {
  std::vector<Group> labels;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string token;
    std::istringstream(line) >> token;
    if (token.empty()) continue;
    if (token == "A" || token == "a") {
      labels.push_back(Group::A);
    } else if (token == "B" || token == "b") {
      labels.push_back(Group::B);
    } else {
      throw InputError("label '" + token + "' at line " +
                           std::to_string(line_number) + " is neither A nor B",
                       line_number);
    }
  }
  if (labels.size() != n) {
    throw InputError("label file has " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(n) + " curves");
  }
  GroupLabels result(std::move(labels),
                     PartitionRule{PartitionRule::Kind::External, 1.0, source});
  require_both_groups(result);
  return result;
}

GroupLabels load_labels(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_labels(in, n, path.string());
}

ValidationReport validate_assumption(const FunctionalSample& sample,
                                     const GroupLabels& labels,
                                     const SubdomainIndex& subdomain) {
  ValidationReport report;
  if (labels.size() != sample.size()) {
    report.message = "labels cover " + std::to_string(labels.size()) +
                     " curves, sample has " + std::to_string(sample.size());
    return report;
  }
  report.n_a = labels.count(Group::A);
  report.n_b = labels.count(Group::B);
  report.min_count_a = std::numeric_limits<std::size_t>::max();
  report.min_count_b = std::numeric_limits<std::size_t>::max();
  for (std::size_t j : subdomain.kept) {
    std::size_t a = 0, b = 0;
    if (j < sample.points()) {
      for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!sample.observed(i, j)) continue;
        (labels[i] == Group::A ? a : b) += 1;
      }
    }
    report.count_a.push_back(a);
    report.count_b.push_back(b);
    report.min_count_a = std::min(report.min_count_a, a);
    report.min_count_b = std::min(report.min_count_b, b);
    if ((a == 0 || b == 0) && !report.failing_column) report.failing_column = j;
  }
  if (subdomain.kept.empty()) {
    report.min_count_a = report.min_count_b = 0;
  }

  if (report.n_a == 0 || report.n_b == 0) {
    report.message = "a group is empty (n_A = " + std::to_string(report.n_a) +
                     ", n_B = " + std::to_string(report.n_b) + ")";
  } else if (subdomain.kept.empty()) {
    report.message = "subdomain is empty";
  } else if (report.failing_column) {
    report.message = "a group has no observations at grid column " +
                     std::to_string(*report.failing_column);
  } else {
    report.passed = true;
    report.message = "ok";
  }
  return report;
}

}  // namespace fdmcar
