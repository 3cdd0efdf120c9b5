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
// Available-case estimators over the testable subdomain.
//
// Everything here works on a RestrictedSample: the kept columns of a
// FunctionalSample packed densely, with unobserved cells zeroed so that
// weighted sums can run without branching on the mask. Curves that are
// entirely unobserved on the subdomain stay in n.

#ifndef FDMCAR_ESTIMATORS_HPP_
#define FDMCAR_ESTIMATORS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "fdmcar/labels.hpp"
#include "fdmcar/matrix.hpp"
#include "fdmcar/random.hpp"
#include "fdmcar/sample_model.hpp"

namespace fdmcar {

struct RestrictedSample {
  std::size_t n = 0;
  std::size_t m = 0;
  double spacing = 0.0;
  std::vector<std::size_t> columns;   // kept grid indices
  std::vector<double> coordinates;    // grid points at the kept columns
  Matrix values;                      // n x m, 0 where unobserved
  MaskMatrix mask;                    // n x m
  std::vector<Group> labels;

  double domain_length() const noexcept {
    return static_cast<double>(m) * spacing;
  }
  std::size_t group_size(Group g) const noexcept;
  // Observed count per kept column within group g.
  std::vector<std::size_t> observed_counts(Group g) const;
};

RestrictedSample restrict_sample(const FunctionalSample& sample,
                                 const GroupLabels& labels,
                                 const SubdomainIndex& subdomain);

struct MeanEstimate {
  std::vector<double> mu;
  std::vector<double> p_hat;
  Group group = Group::A;
};

struct EcdfEstimate {
  Matrix F;  // kept column x z-grid point
  std::vector<double> z_grid;
  Group group = Group::A;
};

struct KernelMatrix {
  Matrix k;
  double quadrature_weight = 0.0;
};

struct McPoint {
  std::size_t column = 0;  // index into the kept columns
  double z = 0.0;
};

struct RhoMatrix {
  Matrix rho;
  std::vector<McPoint> mc_points;
  double domain_length = 0.0;
};

struct NuMeasure {
  double theta = 0.0;
  double tau2 = 1.0;
};

// Throws ValidationError("degenerate_column") if group g is unobserved at
// some kept column.
MeanEstimate group_mean(const RestrictedSample& data, Group g);
MeanEstimate group_mean(const FunctionalSample& sample,
                        const GroupLabels& labels,
                        const SubdomainIndex& subdomain, Group g);

// mu_A - mu_B over the kept columns.
std::vector<double> mean_difference(const RestrictedSample& data);

EcdfEstimate ecdf_surface(const RestrictedSample& data, Group g,
                          std::span<const double> z_grid);
EcdfEstimate ecdf_surface(const FunctionalSample& sample,
                          const GroupLabels& labels,
                          const SubdomainIndex& subdomain, Group g,
                          std::span<const double> z_grid);

// Available-case estimator of the covariance of sqrt(n)(mu_A - mu_B),
// built from residuals about each curve's own group mean.
KernelMatrix covariance_kernel_hat(const RestrictedSample& data);
KernelMatrix covariance_kernel_hat(const FunctionalSample& sample,
                                   const GroupLabels& labels,
                                   const SubdomainIndex& subdomain);

// Covariance of the indicator process at the given Monte Carlo points.
RhoMatrix rho_hat(const RestrictedSample& data,
                  std::span<const McPoint> points);

// K points: columns uniform over the kept set (with replacement), levels
// drawn from N(theta, tau2).
std::vector<McPoint> draw_mc_points(const RestrictedSample& data,
                                    const NuMeasure& nu, std::size_t K,
                                    RandomStream& rng);

RhoMatrix rho_hat(const RestrictedSample& data, const NuMeasure& nu,
                  std::size_t K, RandomStream& rng);

// Pooled available-case location and scale of the process over the kept
// columns. theta averages the per-column means over the subdomain; tau2 is
// the largest per-column variance (denominator n_obs - 1).
NuMeasure estimate_nu(const RestrictedSample& data);
NuMeasure estimate_nu(const FunctionalSample& sample,
                      const SubdomainIndex& subdomain);

std::vector<double> draw_nu(const NuMeasure& nu, std::size_t count,
                            RandomStream& rng);

// 101 equispaced levels from (min observed - tau/4) to (max observed + tau/4).
std::vector<double> default_z_grid(const RestrictedSample& data,
                                   const NuMeasure& nu,
                                   std::size_t points = 101);

}  // namespace fdmcar

#endif  // FDMCAR_ESTIMATORS_HPP_
