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
#include "fdmcar/analysis.hpp"

#include <algorithm>

#include "fdmcar/error.hpp"

namespace fdmcar {

McarAnalysis::McarAnalysis(const FunctionalSample& sample,
                           const GroupLabels& labels, TestConfig config)
    : config_(config),
      subdomain_(restrict_domain(sample, labels, config.coverage)),
      report_(validate_assumption(sample, labels, subdomain_)),
      source_(config.seed) {
  if (!report_.passed) {
    throw ValidationError("assumption_violation", report_.message);
  }
  if (config_.bstar < 1) throw InputError("B* must be at least 1");
  data_ = restrict_sample(sample, labels, subdomain_);
}

const NuMeasure& McarAnalysis::nu() {
  if (!nu_) nu_ = estimate_nu(data_);
  return *nu_;
}

const std::vector<double>& McarAnalysis::z_draws() {
  if (!z_draws_) {
    RandomStream rng = source_.stream("nu-draws", 0);
    z_draws_ = draw_nu(nu(), config_.mz, rng);
  }
  return *z_draws_;
}

const KernelMatrix& McarAnalysis::kernel() {
  if (!kernel_) kernel_ = covariance_kernel_hat(data_);
  return *kernel_;
}

const EigenSystem& McarAnalysis::kernel_eigensystem() {
  if (!kernel_eigs_) {
    kernel_eigs_ =
        operator_scale(sym_eig(kernel().k), kernel().quadrature_weight);
  }
  return *kernel_eigs_;
}

std::size_t McarAnalysis::kernel_q() {
  if (!kernel_q_) {
    kernel_q_ = truncate_fve(kernel_eigensystem().eigenvalues, config_.fve,
                             config_.q_max);
  }
  return *kernel_q_;
}

const RhoMatrix& McarAnalysis::rho() {
  if (!rho_) {
    RandomStream rng = source_.stream("rho-points", 0);
    rho_ = rho_hat(data_, nu(), config_.rho_points, rng);
  }
  return *rho_;
}

const std::vector<double>& McarAnalysis::cvm_eigenvalues() {
  if (!cvm_eigs_) cvm_eigs_ = cvm_spectrum(rho());
  return *cvm_eigs_;
}

std::size_t McarAnalysis::cvm_q() {
  if (!cvm_q_) cvm_q_ = truncate_fve(cvm_eigenvalues(), config_.fve, config_.q_max);
  return *cvm_q_;
}

const std::vector<double>& McarAnalysis::sup_draws() {
  if (!sup_draws_) {
    sup_draws_ = sample_limit_sup(kernel_eigensystem(), kernel_q(),
                                  config_.bstar, source_, config_.threads);
  }
  return *sup_draws_;
}

BootstrapConfig McarAnalysis::bootstrap_config() const {
  BootstrapConfig bc;
  bc.bstar = config_.bstar;
  bc.seed = config_.seed;
  bc.max_redraws = config_.max_redraws;
  bc.mz = config_.mz;
  bc.threads = config_.threads;
  return bc;
}

TestResult McarAnalysis::asymptotic(Method method) {
  TestResult result;
  result.method = method;
  result.calibration = Calibration::Asymptotic;
  result.seed = config_.seed;
  switch (method) {
    case Method::L2:
      result.statistic = stat_l2(data_);
      result.q_used = kernel_q();
      result.draws = sample_limit_l2(kernel_eigensystem(), result.q_used,
                                     config_.bstar, source_, config_.threads);
      break;
    case Method::Sup:
      result.statistic = stat_sup(data_);
      result.q_used = kernel_q();
      result.draws = sup_draws();
      break;
    case Method::CvM:
      result.statistic = stat_cvm(data_, z_draws());
      result.q_used = cvm_q();
      result.draws = sample_limit_l2(cvm_eigenvalues(), result.q_used,
                                     config_.bstar, source_, config_.threads);
      break;
  }
  result.p_value = pvalue(result.statistic, result.draws);
  return result;
}

TestResult McarAnalysis::run(Method method, Calibration calibration) {
  const Method one[] = {method};
  return run_all(one, calibration).front();
}

std::vector<TestResult> McarAnalysis::run_all(std::span<const Method> methods,
                                              Calibration calibration) {
  std::vector<TestResult> results;
  if (calibration == Calibration::Asymptotic) {
    for (Method m : methods) results.push_back(asymptotic(m));
    return results;
  }

  const bool mean = std::any_of(methods.begin(), methods.end(),
                                [](Method m) { return m != Method::CvM; });
  const bool dist = std::find(methods.begin(), methods.end(), Method::CvM) !=
                    methods.end();
  std::vector<double> z;
  if (dist) z = z_draws();
  BootstrapDraws draws = bootstrap_draws(data_, z, mean, dist, bootstrap_config());
  for (Method m : methods) {
    TestResult r;
    r.method = m;
    r.calibration = Calibration::Bootstrap;
    r.seed = config_.seed;
    switch (m) {
      case Method::L2:
        r.statistic = stat_l2(data_);
        r.draws = draws.l2;
        break;
      case Method::Sup:
        r.statistic = stat_sup(data_);
        r.draws = draws.sup;
        break;
      case Method::CvM:
        r.statistic = stat_cvm(data_, z);
        r.draws = draws.cvm;
        break;
    }
    r.p_value = pvalue(r.statistic, r.draws);
    results.push_back(std::move(r));
  }
  return results;
}

ConfidenceBand McarAnalysis::band(double level, Calibration calibration) {
  if (calibration == Calibration::Bootstrap) {
    return bootstrap_band(data_, level, bootstrap_config());
  }
  ConfidenceBand band = make_band(data_, sup_draws(), level, Calibration::Asymptotic);
  band.q_used = kernel_q();
  return band;
}

TestResult run_test(const FunctionalSample& sample, const GroupLabels& labels,
                    Method method, Calibration calibration,
                    const TestConfig& config) {
  McarAnalysis analysis(sample, labels, config);
  return analysis.run(method, calibration);
}

}  // namespace fdmcar
