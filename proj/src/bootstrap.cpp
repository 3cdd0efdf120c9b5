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
#include "fdmcar/bootstrap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "fdmcar/error.hpp"
#include "fdmcar/parallel.hpp"

namespace fdmcar {

namespace {

std::array<std::vector<std::size_t>, 2> group_members(const RestrictedSample& data) {
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < data.n; ++i) {
    members[static_cast<int>(data.labels[i])].push_back(i);
  }
  return members;
}

std::vector<std::size_t> resample_with(
    const RestrictedSample& data,
    const std::array<std::vector<std::size_t>, 2>& members, RandomStream& rng) {
  std::vector<std::size_t> source(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto& pool = members[static_cast<int>(data.labels[i])];
    source[i] = pool[rng.index(pool.size())];
  }
  return source;
}

void require_valid(const RestrictedSample& data) {
  if (data.group_size(Group::A) == 0 || data.group_size(Group::B) == 0) {
    throw ValidationError("assumption_violation",
                          "bootstrap needs both groups to be non-empty");
  }
}

void validate_config(const BootstrapConfig& config) {
  if (config.bstar < 1) throw InputError("B* must be at least 1");
}

// Mean and ecdf replicate statistics from one sweep over the observed cells
// of the drawn curves.
class ReplicateKernel {
 public:
  ReplicateKernel(const RestrictedSample& data, std::span<const double> z_draws,
                  bool mean, bool dist)
      : n_(data.n), m_(data.m), spacing_(data.spacing), mean_(mean), dist_(dist),
        labels_(data.labels) {
    std::vector<double> z(z_draws.begin(), z_draws.end());
    std::sort(z.begin(), z.end());
    levels_ = dist ? z.size() : 0;
    if (dist && levels_ == 0) {
      throw InputError("CvM statistic needs at least one z draw");
    }
    std::array<MeanEstimate, 2> means;
    if (mean) means = {group_mean(data, Group::A), group_mean(data, Group::B)};
    offset_.push_back(0);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto g = static_cast<std::size_t>(data.labels[i]);
      for (std::size_t j = 0; j < m_; ++j) {
        if (!data.mask(i, j)) continue;
        Cell cell{static_cast<std::uint32_t>(j), 0, 0.0};
        if (dist) {
          cell.level = static_cast<std::uint32_t>(
              std::lower_bound(z.begin(), z.end(), data.values(i, j)) - z.begin());
        }
        if (mean) cell.centered = data.values(i, j) - means[g].mu[j];
        cells_.push_back(cell);
      }
      offset_.push_back(cells_.size());
    }
    if (dist) {
      std::vector<double> sums;
      std::vector<double> counts;
      std::vector<double> hist;
      accumulate<false, true>(std::vector<double>(n_, 1.0), sums, counts, hist);
      const std::size_t M = levels_;
      base_.assign(2 * m_ * M, 0.0);
      for (std::size_t gj = 0; gj < 2 * m_; ++gj) {
        if (counts[gj] == 0.0) {
          throw ValidationError("degenerate_column",
                                "a group has no observations at some kept column");
        }
        const double inv = 1.0 / counts[gj];
        double running = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
          running += hist[gj * (M + 1) + k];
          base_[gj * M + k] = running * inv;
        }
      }
    }
  }

  // False when the resample leaves a kept column empty in some group.
  bool evaluate(std::span<const double> weight, MeanReplicate& mr,
                double& cvm) const {
    thread_local std::vector<double> sums;
    thread_local std::vector<double> counts;
    thread_local std::vector<double> hist;
    if (mean_ && dist_) {
      accumulate<true, true>(weight, sums, counts, hist);
    } else if (mean_) {
      accumulate<true, false>(weight, sums, counts, hist);
    } else {
      accumulate<false, true>(weight, sums, counts, hist);
    }
    const std::size_t m = m_;
    for (std::size_t j = 0; j < m; ++j) {
      if (counts[j] == 0.0 || counts[m + j] == 0.0) return false;
    }
    if (mean_) {
      thread_local std::vector<double> diff;
      diff.resize(m);
      for (std::size_t j = 0; j < m; ++j) {
        diff[j] = sums[j] / counts[j] - sums[m + j] / counts[m + j];
      }
      mr = MeanReplicate{stat_l2(diff, n_, spacing_), stat_sup(diff, n_)};
    }
    if (dist_) {
      const std::size_t M = levels_;
      const std::size_t plane = m * M;
      double sum = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double ia = 1.0 / counts[j];
        const double ib = 1.0 / counts[m + j];
        const double* ha = &hist[j * (M + 1)];
        const double* hb = &hist[(m + j) * (M + 1)];
        const double* fa = &base_[j * M];
        const double* fb = &base_[plane + j * M];
        double ra = 0.0;
        double rb = 0.0;
        for (std::size_t k = 0; k < M; ++k) {
          ra += ha[k];
          rb += hb[k];
          const double d = (ra * ia - fa[k]) - (rb * ib - fb[k]);
          sum += d * d;
        }
      }
      cvm = static_cast<double>(n_) * sum * spacing_ / static_cast<double>(M);
    }
    return true;
  }

 private:
  struct Cell {
    std::uint32_t column;
    std::uint32_t level;
    double centered;
  };

  template <bool kMean, bool kDist>
  void accumulate(std::span<const double> weight, std::vector<double>& sums,
                  std::vector<double>& counts, std::vector<double>& hist) const {
    const std::size_t m = m_;
    const std::size_t stride = levels_ + 1;  // last bucket: above every level
    counts.assign(2 * m, 0.0);
    if (kMean) sums.assign(2 * m, 0.0);
    if (kDist) hist.assign(2 * m * stride, 0.0);
    for (std::size_t s = 0; s < n_; ++s) {
      const double w = weight[s];
      if (w == 0.0) continue;
      const std::size_t base = static_cast<std::size_t>(labels_[s]) * m;
      double* c = &counts[base];
      double* x = kMean ? &sums[base] : nullptr;
      double* h = kDist ? &hist[base * stride] : nullptr;
      const Cell* cell = &cells_[offset_[s]];
      const Cell* end = cells_.data() + offset_[s + 1];
      for (; cell != end; ++cell) {
        c[cell->column] += w;
        if constexpr (kMean) x[cell->column] += w * cell->centered;
        if constexpr (kDist) h[cell->column * stride + cell->level] += w;
      }
    }
  }

  std::size_t n_;
  std::size_t m_;
  double spacing_;
  bool mean_;
  bool dist_;
  std::vector<Group> labels_;
  std::size_t levels_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<Cell> cells_;
  std::vector<double> base_;
};

}  // namespace

RestrictedSample center_by_group(const RestrictedSample& data) {
  const MeanEstimate means[2] = {group_mean(data, Group::A),
                                 group_mean(data, Group::B)};
  RestrictedSample centered = data;
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto& mu = means[static_cast<int>(data.labels[i])].mu;
    for (std::size_t j = 0; j < data.m; ++j) {
      if (data.mask(i, j)) centered.values(i, j) = data.values(i, j) - mu[j];
    }
  }
  return centered;
}

std::vector<std::size_t> draw_group_resample(const RestrictedSample& data,
                                             RandomStream& rng) {
  return resample_with(data, group_members(data), rng);
}

std::vector<double> resample_weights(std::span<const std::size_t> source,
                                     std::size_t n) {
  std::vector<double> weight(n, 0.0);
  for (std::size_t s : source) weight.at(s) += 1.0;
  return weight;
}

std::optional<MeanReplicate> mean_replicate(const RestrictedSample& centered,
                                            std::span<const std::size_t> source) {
  if (source.size() != centered.n) throw InputError("resample size mismatch");
  return mean_replicate_weighted(centered, resample_weights(source, centered.n));
}

std::optional<MeanReplicate> mean_replicate_weighted(
    const RestrictedSample& centered, std::span<const double> weight) {
  const std::size_t m = centered.m;
  if (weight.size() != centered.n) throw InputError("resample size mismatch");
  thread_local std::vector<double> sums;
  thread_local std::vector<double> counts;
  thread_local std::vector<double> diff;
  sums.assign(2 * m, 0.0);
  counts.assign(2 * m, 0.0);
  diff.resize(m);
  for (std::size_t s = 0; s < centered.n; ++s) {
    const double w = weight[s];
    if (w == 0.0) continue;
    const std::size_t g = static_cast<std::size_t>(centered.labels[s]);
    const double* x = centered.values.row(s).data();
    const std::uint8_t* o = centered.mask.row(s).data();
    double* sum = &sums[g * m];
    double* count = &counts[g * m];
    for (std::size_t j = 0; j < m; ++j) {
      sum[j] += w * x[j];
      count[j] += w * o[j];
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (counts[j] == 0.0 || counts[m + j] == 0.0) return std::nullopt;
    diff[j] = sums[j] / counts[j] - sums[m + j] / counts[m + j];
  }
  return MeanReplicate{stat_l2(diff, centered.n, centered.spacing),
                       stat_sup(diff, centered.n)};
}

BootstrapDraws bootstrap_draws(const RestrictedSample& data,
                               std::span<const double> z_draws, bool mean,
                               bool dist, const BootstrapConfig& config) {
  validate_config(config);
  require_valid(data);
  const std::size_t bstar = config.bstar;
  const std::size_t budget =
      config.max_redraws == 0 ? 100 * bstar : config.max_redraws;

  const ReplicateKernel kernel(data, z_draws, mean, dist);

  const auto members = group_members(data);
  const RandomSource source(config.seed);

  BootstrapDraws out;
  if (mean) {
    out.l2.resize(bstar);
    out.sup.resize(bstar);
  }
  if (dist) out.cvm.resize(bstar);
  std::vector<std::size_t> attempts(bstar, 0);

  parallel_for(bstar, config.threads, [&](std::size_t b) {
    for (std::size_t attempt = 0;; ++attempt) {
      if (attempt > budget) {
        throw ValidationError(
            "degenerate_replicates",
            "bootstrap replicate " + std::to_string(b) +
                " kept leaving a column without observations in some group");
      }
      RandomStream rng =
          attempt == 0 ? source.stream("bootstrap", b)
                       : source.derive("bootstrap-redraw", b).stream("attempt", attempt);
      const auto weight =
          resample_weights(resample_with(data, members, rng), data.n);
      MeanReplicate mr;
      double cr = 0.0;
      if (!kernel.evaluate(weight, mr, cr)) continue;
      if (mean) {
        out.l2[b] = mr.l2;
        out.sup[b] = mr.sup;
      }
      if (dist) out.cvm[b] = cr;
      attempts[b] = attempt;
      return;
    }
  });

  for (std::size_t a : attempts) out.redraws += a;
  if (out.redraws > budget) {
    throw ValidationError("degenerate_replicates",
                          std::to_string(out.redraws) +
                              " bootstrap redraws exceed the budget of " +
                              std::to_string(budget));
  }
  return out;
}

TestResult bootstrap_mean_test(const RestrictedSample& data, Method kind,
                               const BootstrapConfig& config) {
  if (kind == Method::CvM) {
    throw InputError("bootstrap_mean_test handles L2 and Sup only");
  }
  auto draws = bootstrap_draws(data, {}, true, false, config);
  TestResult result;
  result.method = kind;
  result.calibration = Calibration::Bootstrap;
  result.seed = config.seed;
  result.statistic = kind == Method::L2 ? stat_l2(data) : stat_sup(data);
  result.draws = kind == Method::L2 ? std::move(draws.l2) : std::move(draws.sup);
  result.p_value = pvalue(result.statistic, result.draws);
  return result;
}

TestResult bootstrap_mean_test(const FunctionalSample& sample,
                               const GroupLabels& labels,
                               const SubdomainIndex& subdomain, Method kind,
                               const BootstrapConfig& config) {
  return bootstrap_mean_test(restrict_sample(sample, labels, subdomain), kind,
                             config);
}

TestResult bootstrap_dist_test(const RestrictedSample& data,
                               std::span<const double> z_draws,
                               const BootstrapConfig& config) {
  auto draws = bootstrap_draws(data, z_draws, false, true, config);
  TestResult result;
  result.method = Method::CvM;
  result.calibration = Calibration::Bootstrap;
  result.seed = config.seed;
  result.statistic = stat_cvm(data, z_draws);
  result.draws = std::move(draws.cvm);
  result.p_value = pvalue(result.statistic, result.draws);
  return result;
}

TestResult bootstrap_dist_test(const FunctionalSample& sample,
                               const GroupLabels& labels,
                               const SubdomainIndex& subdomain,
                               const NuMeasure& nu,
                               const BootstrapConfig& config) {
  RandomStream rng = RandomSource(config.seed).stream("nu-draws", 0);
  const auto z = draw_nu(nu, config.mz, rng);
  return bootstrap_dist_test(restrict_sample(sample, labels, subdomain), z,
                             config);
}

ConfidenceBand bootstrap_band(const RestrictedSample& data, double level,
                              const BootstrapConfig& config) {
  const auto draws = bootstrap_draws(data, {}, true, false, config);
  return make_band(data, draws.sup, level, Calibration::Bootstrap);
}

ConfidenceBand bootstrap_band(const FunctionalSample& sample,
                              const GroupLabels& labels,
                              const SubdomainIndex& subdomain, double level,
                              const BootstrapConfig& config) {
  return bootstrap_band(restrict_sample(sample, labels, subdomain), level,
                        config);
}

}  // namespace fdmcar
