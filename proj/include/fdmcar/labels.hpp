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
#ifndef FDMCAR_LABELS_HPP_
#define FDMCAR_LABELS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fdmcar {

enum class Group : std::uint8_t { A = 0, B = 1 };

inline constexpr Group other(Group g) noexcept {
  return g == Group::A ? Group::B : Group::A;
}

inline constexpr const char* to_string(Group g) noexcept {
  return g == Group::A ? "A" : "B";
}

struct PartitionRule {
  enum class Kind { Complete, Measure, External };

  Kind kind = Kind::Complete;
  double delta = 1.0;   // Measure only
  std::string source;   // External only: where the labels came from

  std::string describe() const;
};

// Per-curve group assignment. A plain value: single-group labelings are
// representable so that validate_assumption can report on them; the
// partition_* constructors refuse to produce them.
class GroupLabels {
 public:
  GroupLabels() = default;
  GroupLabels(std::vector<Group> labels, PartitionRule rule)
      : labels_(std::move(labels)), rule_(std::move(rule)) {}

  std::size_t size() const noexcept { return labels_.size(); }
  Group operator[](std::size_t i) const noexcept { return labels_[i]; }
  const std::vector<Group>& labels() const noexcept { return labels_; }
  const PartitionRule& rule() const noexcept { return rule_; }

  std::size_t count(Group g) const noexcept {
    std::size_t c = 0;
    for (Group l : labels_) c += (l == g);
    return c;
  }

  GroupLabels swapped() const {
    std::vector<Group> flipped(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) flipped[i] = other(labels_[i]);
    return {std::move(flipped), rule_};
  }

 private:
  std::vector<Group> labels_;
  PartitionRule rule_;
};

}  // namespace fdmcar

#endif  // FDMCAR_LABELS_HPP_
