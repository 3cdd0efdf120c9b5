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
#include "fdmcar/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fdmcar/error.hpp"

namespace fdmcar {

namespace {

int slot(Group g) { return static_cast<int>(g); }

// Observed count per group per kept column, [group][column].
std::array<std::vector<double>, 2> group_counts(const RestrictedSample& data) {
  std::array<std::vector<double>, 2> counts{std::vector<double>(data.m, 0.0),
                                            std::vector<double>(data.m, 0.0)};
  for (std::size_t i = 0; i < data.n; ++i) {
    auto& c = counts[slot(data.labels[i])];
    const auto row = data.mask.row(i);
    for (std::size_t j = 0; j < data.m; ++j) c[j] += row[j];
  }
  return counts;
}

void require_observed(const RestrictedSample& data,
                      const std::vector<double>& counts, Group g) {
  for (std::size_t j = 0; j < data.m; ++j) {
    if (counts[j] == 0.0) {
      throw ValidationError(
          "degenerate_column",
          std::string("group ") + to_string(g) +
              " has no observations at grid column " +
              std::to_string(data.columns.empty() ? j : data.columns[j]));
    }
  }
}

}  // namespace

std::size_t RestrictedSample::group_size(Group g) const noexcept {
  std::size_t c = 0;
  for (Group l : labels) c += (l == g);
  return c;
}

std::vector<std::size_t> RestrictedSample::observed_counts(Group g) const {
  std::vector<std::size_t> counts(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != g) continue;
    const auto row = mask.row(i);
    for (std::size_t j = 0; j < m; ++j) counts[j] += row[j];
  }
  return counts;
}

RestrictedSample restrict_sample(const FunctionalSample& sample,
                                 const GroupLabels& labels,
                                 const SubdomainIndex& subdomain) {
  if (labels.size() != sample.size()) {
    throw InputError("labels cover " + std::to_string(labels.size()) +
                     " curves, sample has " + std::to_string(sample.size()));
  }
  if (subdomain.kept.empty()) {
    throw ValidationError("no_testable_subdomain", "subdomain is empty");
  }
  RestrictedSample data;
  data.n = sample.size();
  data.m = subdomain.kept.size();
  data.spacing = sample.grid().spacing();
  data.columns = subdomain.kept;
  data.labels = labels.labels();
  data.values = Matrix(data.n, data.m, 0.0);
  data.mask = MaskMatrix(data.n, data.m, 0);
  for (std::size_t j = 0; j < data.m; ++j) {
    const std::size_t col = subdomain.kept[j];
    if (col >= sample.points()) {
      throw InputError("subdomain column " + std::to_string(col) +
                       " outside the grid");
    }
    data.coordinates.push_back(sample.grid()[col]);
  }
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.m; ++j) {
      const std::size_t col = subdomain.kept[j];
      if (sample.observed(i, col)) {
        data.mask(i, j) = 1;
        data.values(i, j) = sample.value(i, col);
      }
    }
  }
  return data;
}

MeanEstimate group_mean(const RestrictedSample& data, Group g) {
  std::vector<double> sums(data.m, 0.0);
  std::vector<double> counts(data.m, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.labels[i] != g) continue;
    const auto x = data.values.row(i);
    const auto o = data.mask.row(i);
    for (std::size_t j = 0; j < data.m; ++j) {
      sums[j] += x[j];
      counts[j] += o[j];
    }
  }
  require_observed(data, counts, g);
  MeanEstimate est;
  est.group = g;
  est.mu.resize(data.m);
  est.p_hat.resize(data.m);
  const double n = static_cast<double>(data.n);
  for (std::size_t j = 0; j < data.m; ++j) {
    est.p_hat[j] = counts[j] / n;
    est.mu[j] = sums[j] / counts[j];
  }
  return est;
}

MeanEstimate group_mean(const FunctionalSample& sample,
                        const GroupLabels& labels,
                        const SubdomainIndex& subdomain, Group g) {
  return group_mean(restrict_sample(sample, labels, subdomain), g);
}

std::vector<double> mean_difference(const RestrictedSample& data) {
  const MeanEstimate a = group_mean(data, Group::A);
  const MeanEstimate b = group_mean(data, Group::B);
  std::vector<double> diff(data.m);
  for (std::size_t j = 0; j < data.m; ++j) diff[j] = a.mu[j] - b.mu[j];
  return diff;
}

EcdfEstimate ecdf_surface(const RestrictedSample& data, Group g,
                          std::span<const double> z_grid) {
  if (z_grid.empty()) throw InputError("z grid is empty");
  if (!std::is_sorted(z_grid.begin(), z_grid.end())) {
    throw InputError("z grid must be ascending");
  }
  const std::size_t levels = z_grid.size();
  EcdfEstimate est;
  est.group = g;
  est.z_grid.assign(z_grid.begin(), z_grid.end());
  est.F = Matrix(data.m, levels, 0.0);
  std::vector<double> counts(data.m, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.labels[i] != g) continue;
    for (std::size_t j = 0; j < data.m; ++j) {
      if (!data.mask(i, j)) continue;
      counts[j] += 1.0;
      // First level with x <= z; every later level counts too.
      const auto first = std::lower_bound(z_grid.begin(), z_grid.end(),
                                          data.values(i, j));
      for (auto it = first; it != z_grid.end(); ++it) {
        est.F(j, static_cast<std::size_t>(it - z_grid.begin())) += 1.0;
      }
    }
  }
  require_observed(data, counts, g);
  for (std::size_t j = 0; j < data.m; ++j) {
    for (std::size_t k = 0; k < levels; ++k) est.F(j, k) /= counts[j];
  }
  return est;
}

EcdfEstimate ecdf_surface(const FunctionalSample& sample,
                          const GroupLabels& labels,
                          const SubdomainIndex& subdomain, Group g,
                          std::span<const double> z_grid) {
  return ecdf_surface(restrict_sample(sample, labels, subdomain), g, z_grid);
}

KernelMatrix covariance_kernel_hat(const RestrictedSample& data) {
  const MeanEstimate means[2] = {group_mean(data, Group::A),
                                 group_mean(data, Group::B)};
  const std::size_t m = data.m;
  // Row i of the weighted residual design: (X_i - mu_g) O_i / p_g.
  std::vector<double> a(m);
  Matrix k(m, m, 0.0);
  for (std::size_t i = 0; i < data.n; ++i) {
    const MeanEstimate& est = means[slot(data.labels[i])];
    bool any = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (data.mask(i, j)) {
        a[j] = (data.values(i, j) - est.mu[j]) / est.p_hat[j];
        any = true;
      } else {
        a[j] = 0.0;
      }
    }
    if (!any) continue;
    for (std::size_t j = 0; j < m; ++j) {
      const double aj = a[j];
      if (aj == 0.0) continue;
      double* out = &k(j, 0);
      for (std::size_t l = j; l < m; ++l) out[l] += aj * a[l];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(data.n);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = j; l < m; ++l) {
      k(j, l) *= inv_n;
      k(l, j) = k(j, l);
    }
  }
  return {std::move(k), data.spacing};
}

KernelMatrix covariance_kernel_hat(const FunctionalSample& sample,
                                   const GroupLabels& labels,
                                   const SubdomainIndex& subdomain) {
  return covariance_kernel_hat(restrict_sample(sample, labels, subdomain));
}

RhoMatrix rho_hat(const RestrictedSample& data,
                  std::span<const McPoint> points) {
  const std::size_t K = points.size();
  if (K < 2) throw InputError("rho_hat needs at least two Monte Carlo points");
  for (const McPoint& pt : points) {
    if (pt.column >= data.m) {
      throw InputError("Monte Carlo point column outside the subdomain");
    }
  }
  const auto counts = group_counts(data);
  require_observed(data, counts[0], Group::A);
  require_observed(data, counts[1], Group::B);
  const double n = static_cast<double>(data.n);

  // F_g(t_k, z_k) for both groups.
  std::array<std::vector<double>, 2> F{std::vector<double>(K, 0.0),
                                       std::vector<double>(K, 0.0)};
  for (std::size_t i = 0; i < data.n; ++i) {
    auto& f = F[slot(data.labels[i])];
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t j = points[k].column;
      if (data.mask(i, j) && data.values(i, j) <= points[k].z) f[k] += 1.0;
    }
  }
  for (int g = 0; g < 2; ++g) {
    for (std::size_t k = 0; k < K; ++k) F[g][k] /= counts[g][points[k].column];
  }

  Matrix rho(K, K, 0.0);
  std::vector<double> b(K);
  for (std::size_t i = 0; i < data.n; ++i) {
    const int g = slot(data.labels[i]);
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t j = points[k].column;
      if (!data.mask(i, j)) {
        b[k] = 0.0;
        continue;
      }
      const double indicator = data.values(i, j) <= points[k].z ? 1.0 : 0.0;
      b[k] = (indicator - F[g][k]) / (counts[g][j] / n);
    }
    for (std::size_t k = 0; k < K; ++k) {
      const double bk = b[k];
      if (bk == 0.0) continue;
      double* out = &rho(k, 0);
      for (std::size_t l = k; l < K; ++l) out[l] += bk * b[l];
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t l = k; l < K; ++l) {
      rho(k, l) /= n;
      rho(l, k) = rho(k, l);
    }
  }
  return {std::move(rho), {points.begin(), points.end()}, data.domain_length()};
}

std::vector<McPoint> draw_mc_points(const RestrictedSample& data,
                                    const NuMeasure& nu, std::size_t K,
                                    RandomStream& rng) {
  std::vector<McPoint> points(K);
  const double tau = std::sqrt(nu.tau2);
  for (McPoint& pt : points) {
    pt.column = rng.index(data.m);
    pt.z = nu.theta + tau * rng.normal();
  }
  return points;
}

RhoMatrix rho_hat(const RestrictedSample& data, const NuMeasure& nu,
                  std::size_t K, RandomStream& rng) {
  const auto points = draw_mc_points(data, nu, K, rng);
  return rho_hat(data, points);
}

NuMeasure estimate_nu(const RestrictedSample& data) {
  NuMeasure nu;
  double mean_sum = 0.0;
  double sup_var = 0.0;
  for (std::size_t j = 0; j < data.m; ++j) {
    double count = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      if (!data.mask(i, j)) continue;
      count += 1.0;
      sum += data.values(i, j);
    }
    if (count < 2.0) {
      throw ValidationError(
          "variance_undefined",
          "grid column " + std::to_string(data.columns.empty() ? j : data.columns[j]) +
              " has fewer than two pooled observations");
    }
    const double mean = sum / count;
    double ss = 0.0;
    for (std::size_t i = 0; i < data.n; ++i) {
      if (!data.mask(i, j)) continue;
      const double d = data.values(i, j) - mean;
      ss += d * d;
    }
    mean_sum += mean;
    sup_var = std::max(sup_var, ss / (count - 1.0));
  }
  // (1/|I|) * sum_j mean_j * spacing == plain average over kept columns.
  nu.theta = mean_sum / static_cast<double>(data.m);
  nu.tau2 = sup_var;
  if (!(nu.tau2 > 0.0)) {
    throw ValidationError("degenerate_scale",
                          "pooled variance is zero on the whole subdomain");
  }
  return nu;
}

NuMeasure estimate_nu(const FunctionalSample& sample,
                      const SubdomainIndex& subdomain) {
  GroupLabels all_a(std::vector<Group>(sample.size(), Group::A), {});
  return estimate_nu(restrict_sample(sample, all_a, subdomain));
}

std::vector<double> draw_nu(const NuMeasure& nu, std::size_t count,
                            RandomStream& rng) {
  std::vector<double> z(count);
  const double tau = std::sqrt(nu.tau2);
  for (double& v : z) v = nu.theta + tau * rng.normal();
  return z;
}

std::vector<double> default_z_grid(const RestrictedSample& data,
                                   const NuMeasure& nu, std::size_t points) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.m; ++j) {
      if (!data.mask(i, j)) continue;
      lo = std::min(lo, data.values(i, j));
      hi = std::max(hi, data.values(i, j));
    }
  }
  if (!std::isfinite(lo)) throw ValidationError("degenerate_column", "no observations");
  const double pad = 0.25 * std::sqrt(nu.tau2);
  lo -= pad;
  hi += pad;
  std::vector<double> z(points);
  if (points == 1) {
    z[0] = 0.5 * (lo + hi);
    return z;
  }
  for (std::size_t k = 0; k < points; ++k) {
    z[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return z;
}

}  // namespace fdmcar
