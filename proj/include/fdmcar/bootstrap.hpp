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
// Group-wise bootstrap calibration of the mean and distribution tests, and
// bootstrap simultaneous bands.
//
// Each replicate resamples curves with replacement inside their own group.
// Slot i of a replicate is filled with a random member of curve i's group,
// so group sizes, labels and the subdomain are those of the original
// sample. Replicate b uses substream ("bootstrap", b); a replicate that
// leaves some kept column without observations in a group is redrawn from
// substream ("bootstrap-redraw", b, attempt).

#ifndef FDMCAR_BOOTSTRAP_HPP_
#define FDMCAR_BOOTSTRAP_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fdmcar/estimators.hpp"
#include "fdmcar/mcar_tests.hpp"
#include "fdmcar/partition.hpp"
#include "fdmcar/random.hpp"

namespace fdmcar {

struct BootstrapConfig {
  std::size_t bstar = 10000;
  std::uint64_t seed = 0;
  // Total redraw budget across all replicates; 0 means 100 * bstar.
  std::size_t max_redraws = 0;
  std::size_t mz = 100;  // z draws for the CvM functional
  unsigned threads = 1;
};

struct BootstrapDraws {
  std::vector<double> l2;
  std::vector<double> sup;
  std::vector<double> cvm;
  std::size_t redraws = 0;
};

// Curves subtracted by their own group mean where observed.
RestrictedSample center_by_group(const RestrictedSample& data);

// Slot sources for one replicate.
std::vector<std::size_t> draw_group_resample(const RestrictedSample& data,
                                             RandomStream& rng);

struct MeanReplicate {
  double l2 = 0.0;
  double sup = 0.0;
};

// Mean statistics of the resample `source` of (already centered) data.
// nullopt when a kept column is left empty in some group.
std::optional<MeanReplicate> mean_replicate(const RestrictedSample& centered,
                                            std::span<const std::size_t> source);

// Multiplicity of each of the n curves in a resample.
std::vector<double> resample_weights(std::span<const std::size_t> source,
                                     std::size_t n);

// As mean_replicate, with weight[s] copies of curve s in the group of s.
std::optional<MeanReplicate> mean_replicate_weighted(
    const RestrictedSample& centered, std::span<const double> weight);

// One pass producing the requested replicate statistics. `z_draws` is only
// used when `dist` is set.
BootstrapDraws bootstrap_draws(const RestrictedSample& data,
                               std::span<const double> z_draws, bool mean,
                               bool dist, const BootstrapConfig& config);

TestResult bootstrap_mean_test(const RestrictedSample& data, Method kind,
                               const BootstrapConfig& config);
TestResult bootstrap_mean_test(const FunctionalSample& sample,
                               const GroupLabels& labels,
                               const SubdomainIndex& subdomain, Method kind,
                               const BootstrapConfig& config);

// Replicates are centered at the original surfaces; the statistic and the
// replicates share the same z draws.
TestResult bootstrap_dist_test(const RestrictedSample& data,
                               std::span<const double> z_draws,
                               const BootstrapConfig& config);
// Draws config.mz levels from nu on substream ("nu-draws", 0).
TestResult bootstrap_dist_test(const FunctionalSample& sample,
                               const GroupLabels& labels,
                               const SubdomainIndex& subdomain,
                               const NuMeasure& nu,
                               const BootstrapConfig& config);

ConfidenceBand bootstrap_band(const RestrictedSample& data, double level,
                              const BootstrapConfig& config);
ConfidenceBand bootstrap_band(const FunctionalSample& sample,
                              const GroupLabels& labels,
                              const SubdomainIndex& subdomain, double level,
                              const BootstrapConfig& config);

}  // namespace fdmcar

#endif  // FDMCAR_BOOTSTRAP_HPP_
