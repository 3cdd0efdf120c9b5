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

// Loads the stored micro-fixtures and converts them to library types.

#ifndef FDMCAR_TESTS_FIXTURES_HPP_
#define FDMCAR_TESTS_FIXTURES_HPP_

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdmcar/labels.hpp"
#include "fdmcar/sample_model.hpp"
#include "oracle.hpp"

namespace fixtures {

inline std::vector<oracle::Micro> load_micro() {
  std::ifstream f(std::string(FDMCAR_FIXTURE_DIR) + "/micro.json");
  if (!f) throw std::runtime_error("missing micro.json");
  const auto doc = nlohmann::json::parse(f);
  std::vector<oracle::Micro> out;
  for (const auto& e : doc["fixtures"]) {
    oracle::Micro m;
    m.name = e["name"].get<std::string>();
    m.grid = e["grid"].get<std::vector<double>>();
    for (const auto& row : e["values"]) {
      std::vector<std::optional<double>> r;
      for (const auto& v : row) {
        if (v.is_null()) r.push_back(std::nullopt);
        else r.push_back(v.get<double>());
      }
      m.x.push_back(r);
    }
    for (const auto& l : e["labels"]) m.g.push_back(l.get<std::string>() == "A" ? 0 : 1);
    m.z_draws = e["z_draws"].get<std::vector<double>>();
    for (const auto& pt : e["mc_points"]) {
      m.mc.emplace_back(pt[0].get<std::size_t>(), pt[1].get<double>());
    }
    out.push_back(std::move(m));
  }
  return out;
}

inline fdmcar::FunctionalSample to_sample(const oracle::Micro& m) {
  fdmcar::Matrix values(m.n(), m.p(), 0.0);
  fdmcar::MaskMatrix mask(m.n(), m.p(), 0);
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.p(); ++j) {
      if (m.obs(i, j)) {
        values(i, j) = m.val(i, j);
        mask(i, j) = 1;
      } else {
        values(i, j) = fdmcar::kMissingValue;
      }
    }
  }
  return fdmcar::FunctionalSample(fdmcar::Grid::from_points(m.grid), values, mask);
}

inline fdmcar::GroupLabels to_labels(const oracle::Micro& m) {
  std::vector<fdmcar::Group> g;
  for (int v : m.g) g.push_back(v == 0 ? fdmcar::Group::A : fdmcar::Group::B);
  return fdmcar::GroupLabels(g, {fdmcar::PartitionRule::Kind::External, 0.0,
                                 "fixture"});
}

// Relative agreement with an absolute floor at the magnitude of the data.
inline bool close(double a, double b, double rel, double scale = 1.0) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), scale});
}

}  // namespace fixtures

#endif  // FDMCAR_TESTS_FIXTURES_HPP_
