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
// End-to-end test orchestration:
// restrict -> validate -> estimate -> eigendecompose -> sample -> p-value.
//
// Randomness comes from one seed through named substreams:
//   "nu-draws"    levels z_1..z_Mz of the CvM functional
//   "rho-points"  Monte Carlo points of the indicator covariance
//   "limit-draws" asymptotic calibration draws (one substream per draw)
//   "bootstrap"   resampling (one substream per replicate)

#ifndef FDMCAR_ANALYSIS_HPP_
#define FDMCAR_ANALYSIS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fdmcar/bootstrap.hpp"
#include "fdmcar/estimators.hpp"
#include "fdmcar/mcar_tests.hpp"
#include "fdmcar/partition.hpp"
#include "fdmcar/spectral.hpp"

namespace fdmcar {

struct TestConfig {
  std::size_t bstar = 10000;
  double fve = 0.99;
  std::size_t q_max = 50;
  std::size_t mz = 100;          // z draws in the CvM statistic
  std::size_t rho_points = 200;  // Monte Carlo points K for rho
  double coverage = 0.1;         // subdomain threshold
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t max_redraws = 0;   // 0: 100 * bstar
};

class McarAnalysis {
 public:
  // Throws ValidationError when there is no testable subdomain or the
  // partition fails the empirical assumption check on it.
  McarAnalysis(const FunctionalSample& sample, const GroupLabels& labels,
               TestConfig config);

  const TestConfig& config() const noexcept { return config_; }
  const SubdomainIndex& subdomain() const noexcept { return subdomain_; }
  const ValidationReport& validation() const noexcept { return report_; }
  const RestrictedSample& data() const noexcept { return data_; }

  const NuMeasure& nu();
  const std::vector<double>& z_draws();
  const KernelMatrix& kernel();
  const EigenSystem& kernel_eigensystem();
  std::size_t kernel_q();
  const RhoMatrix& rho();
  const std::vector<double>& cvm_eigenvalues();
  std::size_t cvm_q();

  TestResult run(Method method, Calibration calibration);
  // Shares estimates and, for the bootstrap, a single resampling pass.
  std::vector<TestResult> run_all(std::span<const Method> methods,
                                  Calibration calibration);

  ConfidenceBand band(double level, Calibration calibration);

 private:
  BootstrapConfig bootstrap_config() const;
  TestResult asymptotic(Method method);
  const std::vector<double>& sup_draws();

  TestConfig config_;
  SubdomainIndex subdomain_;
  ValidationReport report_;
  RestrictedSample data_;
  RandomSource source_;

  std::optional<NuMeasure> nu_;
  std::optional<std::vector<double>> z_draws_;
  std::optional<KernelMatrix> kernel_;
  std::optional<EigenSystem> kernel_eigs_;
  std::optional<std::size_t> kernel_q_;
  std::optional<RhoMatrix> rho_;
  std::optional<std::vector<double>> cvm_eigs_;
  std::optional<std::size_t> cvm_q_;
  std::optional<std::vector<double>> sup_draws_;
};

TestResult run_test(const FunctionalSample& sample, const GroupLabels& labels,
                    Method method, Calibration calibration,
                    const TestConfig& config);

}  // namespace fdmcar

#endif  // FDMCAR_ANALYSIS_HPP_
