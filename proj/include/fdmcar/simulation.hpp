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
// Brownian-motion scenarios: an MCAR interval-observation design and a
// censoring design that violates MCAR, plus drivers estimating rejection
// rates over repeated samples.

#ifndef FDMCAR_SIMULATION_HPP_
#define FDMCAR_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fdmcar/analysis.hpp"
#include "fdmcar/random.hpp"
#include "fdmcar/sample_model.hpp"

namespace fdmcar {

// Standard Brownian motion on t_j = j/p: cumulative sums of N(0, 1/p)
// increments. Fully observed.
FunctionalSample brownian_sample(std::size_t n, std::size_t p, RandomStream& rng);

// Per curve: with probability 1/2 fully observed, otherwise observed exactly
// on [L, U) with L, U the order statistics of two Uniform[0, 1] draws.
MaskMatrix mcar_interval_mask(std::size_t n, std::size_t p, RandomStream& rng);

// mask(i, j) = 1 iff a < x(i, j) < b.
MaskMatrix censoring_mask(const FunctionalSample& x, double a, double b);

enum class Mechanism { McarInterval, Censoring };

struct ScenarioConfig {
  std::size_t n = 100;
  std::size_t p = 100;
  Mechanism mechanism = Mechanism::McarInterval;
  double a = -1.0;  // censoring only
  double b = 1.0;
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<Method> methods{Method::L2, Method::Sup, Method::CvM};
  std::vector<Calibration> calibrations{Calibration::Asymptotic,
                                        Calibration::Bootstrap};
  TestConfig test;   // bstar, fve, ...; seed and threads are overridden
  unsigned threads = 1;  // replicate-level parallelism
};

// Replicate r of a scenario. Paths do not depend on (a, b), so power curves
// over b use common random numbers.
FunctionalSample scenario_sample(const ScenarioConfig& config, std::size_t r);
std::uint64_t scenario_test_seed(const ScenarioConfig& config, std::size_t r);

struct RejectionCell {
  Method method = Method::L2;
  Calibration calibration = Calibration::Asymptotic;
  std::size_t rejections = 0;
  std::size_t runs = 0;

  double rate() const noexcept;
  // Binomial standard error of the rate.
  double standard_error() const noexcept;
};

struct RejectionTable {
  std::size_t n = 0;
  double alpha = 0.05;
  double b = 0.0;  // censoring upper bound; 0 for the MCAR design
  std::size_t reps = 0;
  std::size_t failed = 0;  // replicates that could not be tested
  std::vector<RejectionCell> cells;

  const RejectionCell& cell(Method m, Calibration c) const;
};

// Partition by complete curves; one row per method x calibration.
RejectionTable run_experiment(const ScenarioConfig& config);

RejectionTable run_type1_experiment(const ScenarioConfig& config);

std::vector<RejectionTable> run_power_experiment(const ScenarioConfig& config,
                                                 std::span<const double> b_grid);

}  // namespace fdmcar

#endif  // FDMCAR_SIMULATION_HPP_
