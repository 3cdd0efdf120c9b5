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
#include "fdmcar/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "fdmcar/error.hpp"
#include "fdmcar/parallel.hpp"
#include "fdmcar/partition.hpp"

namespace fdmcar {

FunctionalSample brownian_sample(std::size_t n, std::size_t p, RandomStream& rng) {
  if (n < 1 || p < 1) throw InputError("need n, p >= 1");
  Matrix x(n, p);
  const double step = std::sqrt(1.0 / static_cast<double>(p));
  for (std::size_t i = 0; i < n; ++i) {
    double level = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      level += step * rng.normal();
      x(i, j) = level;
    }
  }
  return FunctionalSample(Grid::equispaced(p), std::move(x), MaskMatrix(n, p, 1));
}

MaskMatrix mcar_interval_mask(std::size_t n, std::size_t p, RandomStream& rng) {
  MaskMatrix mask(n, p, 1);
  const Grid grid = Grid::equispaced(p);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform() < 0.5) continue;
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double lower = std::min(u1, u2);
    const double upper = std::max(u1, u2);
    for (std::size_t j = 0; j < p; ++j) {
      mask(i, j) = (lower <= grid[j] && grid[j] < upper) ? 1 : 0;
    }
  }
  return mask;
}

MaskMatrix censoring_mask(const FunctionalSample& x, double a, double b) {
  if (!(a < b)) throw InputError("censoring interval needs a < b");
  MaskMatrix mask(x.size(), x.points(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.points(); ++j) {
      const double v = x.value(i, j);
      mask(i, j) = (x.observed(i, j) && a < v && v < b) ? 1 : 0;
    }
  }
  return mask;
}

FunctionalSample scenario_sample(const ScenarioConfig& config, std::size_t r) {
  const RandomSource rep = RandomSource(config.seed).derive("replicate", r);
  RandomStream paths = rep.stream("paths");
  FunctionalSample x = brownian_sample(config.n, config.p, paths);
  MaskMatrix mask;
  if (config.mechanism == Mechanism::McarInterval) {
    RandomStream mask_rng = rep.stream("mask");
    mask = mcar_interval_mask(config.n, config.p, mask_rng);
  } else {
    mask = censoring_mask(x, config.a, config.b);
  }
  return FunctionalSample(x.grid(), x.values(), std::move(mask));
}

std::uint64_t scenario_test_seed(const ScenarioConfig& config, std::size_t r) {
  return RandomSource(config.seed).derive("replicate", r).derive("test").seed();
}

double RejectionCell::rate() const noexcept {
  return runs == 0 ? 0.0
                   : static_cast<double>(rejections) / static_cast<double>(runs);
}

double RejectionCell::standard_error() const noexcept {
  if (runs == 0) return 0.0;
  const double p = rate();
  return std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
}

const RejectionCell& RejectionTable::cell(Method m, Calibration c) const {
  for (const auto& cell : cells) {
    if (cell.method == m && cell.calibration == c) return cell;
  }
  throw InputError(std::string("no cell for ") + to_string(m) + "/" + to_string(c));
}

RejectionTable run_experiment(const ScenarioConfig& config) {
  if (config.reps < 1) throw InputError("reps must be at least 1");
  if (config.mechanism == Mechanism::Censoring && !(config.a < 0.0 && 0.0 < config.b)) {
    throw InputError("censoring needs a < 0 < b");
  }
  if (config.methods.empty() || config.calibrations.empty()) {
    throw InputError("need at least one method and one calibration");
  }
  const std::size_t cells = config.methods.size() * config.calibrations.size();
  // p-values per replicate; NaN marks a replicate that could not be tested.
  std::vector<std::vector<double>> pvalues(config.reps);

  parallel_for(config.reps, config.threads, [&](std::size_t r) {
    const FunctionalSample sample = scenario_sample(config, r);
    TestConfig tc = config.test;
    tc.seed = scenario_test_seed(config, r);
    tc.threads = 1;
    std::vector<double> out;
    out.reserve(cells);
    try {
      const GroupLabels labels = partition_complete(sample);
      McarAnalysis analysis(sample, labels, tc);
      for (Calibration c : config.calibrations) {
        for (const TestResult& res : analysis.run_all(config.methods, c)) {
          out.push_back(res.p_value);
        }
      }
    } catch (const ValidationError&) {
      out.assign(cells, std::nan(""));
    }
    pvalues[r] = std::move(out);
  });

  RejectionTable table;
  table.n = config.n;
  table.alpha = config.alpha;
  table.b = config.mechanism == Mechanism::Censoring ? config.b : 0.0;
  table.reps = config.reps;
  for (Calibration c : config.calibrations) {
    for (Method m : config.methods) {
      table.cells.push_back({m, c, 0, 0});
    }
  }
  for (const auto& row : pvalues) {
    if (std::isnan(row.front())) {
      ++table.failed;
      continue;
    }
    for (std::size_t k = 0; k < cells; ++k) {
      table.cells[k].runs += 1;
      table.cells[k].rejections += (row[k] <= config.alpha);
    }
  }
  return table;
}

RejectionTable run_type1_experiment(const ScenarioConfig& config) {
  if (config.mechanism != Mechanism::McarInterval) {
    throw InputError("type-I experiments use the MCAR interval design");
  }
  return run_experiment(config);
}

std::vector<RejectionTable> run_power_experiment(const ScenarioConfig& config,
                                                 std::span<const double> b_grid) {
  if (config.mechanism != Mechanism::Censoring) {
    throw InputError("power experiments use the censoring design");
  }
  std::vector<RejectionTable> curves;
  for (double b : b_grid) {
    ScenarioConfig at = config;
    at.b = b;
    curves.push_back(run_experiment(at));
  }
  return curves;
}

}  // namespace fdmcar
