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
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fdmcar/error.hpp"
#include "fdmcar/estimators.hpp"
#include "fdmcar/mcar_tests.hpp"
#include "fdmcar/spectral.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace fdmcar;
using fixtures::close;

namespace {

constexpr double kRel = 1e-12;

struct Prepared {
  FunctionalSample sample;
  GroupLabels labels;
  SubdomainIndex sub;
  RestrictedSample data;
};

Prepared prepare(const oracle::Micro& m) {
  auto sample = fixtures::to_sample(m);
  auto labels = fixtures::to_labels(m);
  auto sub = restrict_domain(sample, labels, 0.1);
  auto data = restrict_sample(sample, labels, sub);
  return {std::move(sample), std::move(labels), std::move(sub), std::move(data)};
}

double max_abs(std::span<const double> v) {
  double s = 0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

oracle::Micro find(const std::string& name) {
  for (auto& m : fixtures::load_micro()) {
    if (m.name == name) return m;
  }
  throw std::runtime_error("no fixture " + name);
}

FunctionalSample random_sample(std::mt19937_64& gen, std::size_t n, std::size_t p,
                               double missing, bool full_first = true) {
  std::normal_distribution<double> nd;
  std::bernoulli_distribution miss(missing);
  Matrix v(n, p);
  MaskMatrix mask(n, p, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      v(i, j) = nd(gen);
      if ((!full_first || i % 2 == 1) && miss(gen)) {
        mask(i, j) = 0;
        v(i, j) = kMissingValue;
      }
    }
  }
  return FunctionalSample(Grid::equispaced(p), v, mask);
}

GroupLabels alternating(std::size_t n) {
  std::vector<Group> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = i % 2 ? Group::B : Group::A;
  return GroupLabels(g, {PartitionRule::Kind::External, 0.0, "test"});
}

}  // namespace

TEST_CASE("four-curve fixture: means, p_hat, ecdf and statistics") {
  const auto m = find("four_curve");
  const auto P = prepare(m);
  REQUIRE(P.sub.kept == std::vector<std::size_t>{0, 1});
  const auto a = group_mean(P.data, Group::A);
  const auto b = group_mean(P.data, Group::B);
  CHECK(a.mu == std::vector<double>{2, 3});
  CHECK(a.p_hat == std::vector<double>{0.5, 0.5});
  CHECK(b.mu == std::vector<double>{6, 8});
  CHECK(b.p_hat == std::vector<double>{0.5, 0.25});
  const std::vector<double> z{6.0};
  CHECK(ecdf_surface(P.data, Group::B, z).F(0, 0) == 0.5);
  CHECK(stat_l2(P.data) == doctest::Approx(82).epsilon(1e-14));
  CHECK(stat_sup(P.data) == doctest::Approx(10).epsilon(1e-14));
  CHECK(mean_difference(P.data) == std::vector<double>{-4, -5});
}

TEST_CASE("every stored micro-fixture matches the brute-force oracle") {
  const auto all = fixtures::load_micro();
  REQUIRE(all.size() >= 10);
  for (const auto& m : all) {
    CAPTURE(m.name);
    const auto P = prepare(m);
    const auto kept = oracle::kept(m);
    REQUIRE(P.sub.kept == kept);
    const std::size_t M = kept.size();

    for (int g = 0; g < 2; ++g) {
      const auto est = group_mean(P.data, g == 0 ? Group::A : Group::B);
      const double scale = max_abs(est.mu);
      for (std::size_t k = 0; k < M; ++k) {
        CHECK(close(est.mu[k], oracle::mu(m, g, kept[k]), kRel, scale));
        CHECK(est.p_hat[k] == oracle::phat(m, g, kept[k]));
      }
      std::vector<double> z = m.z_draws;
      std::sort(z.begin(), z.end());
      const auto F = ecdf_surface(P.data, g == 0 ? Group::A : Group::B, z);
      for (std::size_t k = 0; k < M; ++k) {
        for (std::size_t l = 0; l < z.size(); ++l) {
          CHECK(close(F.F(k, l), oracle::ecdf(m, g, kept[k], z[l]), kRel));
        }
      }
    }

    const auto K = covariance_kernel_hat(P.data);
    CHECK(K.quadrature_weight == m.spacing());
    const double kscale = max_abs(K.k.data());
    for (std::size_t a = 0; a < M; ++a) {
      for (std::size_t b = 0; b < M; ++b) {
        CHECK(close(K.k(a, b), oracle::kernel(m, kept[a], kept[b]), kRel, kscale));
      }
    }

    std::vector<McPoint> pts;
    for (const auto& [col, z] : m.mc) pts.push_back({col % M, z});
    const auto R = rho_hat(P.data, pts);
    CHECK(R.domain_length == doctest::Approx(static_cast<double>(M) * m.spacing()));
    const double rscale = std::max(1.0, max_abs(R.rho.data()));
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = 0; b < pts.size(); ++b) {
        CHECK(close(R.rho(a, b),
                    oracle::rho(m, kept[pts[a].column], pts[a].z,
                                kept[pts[b].column], pts[b].z),
                    kRel, rscale));
      }
    }

    const auto nu = estimate_nu(P.data);
    const auto [theta, tau2] = oracle::nu(m);
    CHECK(close(nu.theta, theta, kRel, 1.0));
    CHECK(close(nu.tau2, tau2, kRel));

    CHECK(close(stat_l2(P.data), oracle::stat_l2(m), kRel));
    CHECK(close(stat_sup(P.data), oracle::stat_sup(m), kRel));
    CHECK(close(stat_cvm(P.data, m.z_draws), oracle::stat_cvm(m, m.z_draws), kRel));
  }
}

TEST_CASE("identical fully observed curves give identical group means") {
  Matrix v(4, 3);
  for (std::size_t i = 0; i < 4; ++i) {
    v(i, 0) = 1.5;
    v(i, 1) = -2;
    v(i, 2) = 7;
  }
  const FunctionalSample s(Grid::equispaced(3), v, MaskMatrix(4, 3, 1));
  const auto l = alternating(4);
  const auto data = restrict_sample(s, l, restrict_domain(s, l));
  CHECK(group_mean(data, Group::A).mu == std::vector<double>{1.5, -2, 7});
  CHECK(group_mean(data, Group::B).mu == std::vector<double>{1.5, -2, 7});
}

TEST_CASE("mean equivariance under a constant shift") {
  std::mt19937_64 gen(2);
  const auto s = random_sample(gen, 30, 8, 0.3);
  const auto l = alternating(30);
  Matrix shifted = s.values();
  for (double& x : shifted.data()) x += 3.25;
  const FunctionalSample t(s.grid(), shifted, s.mask());
  const auto sub = restrict_domain(s, l);
  const auto d1 = mean_difference(restrict_sample(s, l, sub));
  const auto d2 = mean_difference(restrict_sample(t, l, sub));
  const auto a1 = group_mean(restrict_sample(s, l, sub), Group::A);
  const auto a2 = group_mean(restrict_sample(t, l, sub), Group::A);
  for (std::size_t j = 0; j < d1.size(); ++j) {
    CHECK(d2[j] == doctest::Approx(d1[j]).epsilon(1e-12).scale(1.0));
    CHECK(a2.mu[j] == doctest::Approx(a1.mu[j] + 3.25).epsilon(1e-12));
  }
}

TEST_CASE("ecdf surface bounds, monotonicity and transform invariance") {
  std::mt19937_64 gen(3);
  const auto s = random_sample(gen, 40, 6, 0.25);
  const auto l = alternating(40);
  const auto data = restrict_sample(s, l, restrict_domain(s, l));
  std::vector<double> z;
  for (int k = -40; k <= 40; ++k) z.push_back(k / 10.0);
  Matrix tv = s.values();
  for (double& x : tv.data()) x = std::isnan(x) ? x : x * x * x + x;
  const FunctionalSample t(s.grid(), tv, s.mask());
  const auto tdata = restrict_sample(t, l, restrict_domain(t, l));
  std::vector<double> tz;
  for (double v : z) tz.push_back(v * v * v + v);
  for (Group g : {Group::A, Group::B}) {
    const auto F = ecdf_surface(data, g, z);
    const auto G = ecdf_surface(tdata, g, tz);
    const std::vector<double> extremes{-100.0, 100.0};
    const auto E = ecdf_surface(data, g, extremes);
    for (std::size_t j = 0; j < data.m; ++j) {
      CHECK(E.F(j, 0) == 0.0);
      CHECK(E.F(j, 1) == 1.0);
      for (std::size_t k = 0; k < z.size(); ++k) {
        if (k) CHECK(F.F(j, k) >= F.F(j, k - 1));
        CHECK(F.F(j, k) == G.F(j, k));
      }
    }
  }
}

TEST_CASE("kernel: zero residuals, row duplication and PSD on complete designs") {
  SUBCASE("one fully observed curve per group") {
    Matrix v(2, 3);
    for (std::size_t j = 0; j < 3; ++j) {
      v(0, j) = static_cast<double>(j);
      v(1, j) = 5.0 - static_cast<double>(j);
    }
    const FunctionalSample s(Grid::equispaced(3), v, MaskMatrix(2, 3, 1));
    const auto l = alternating(2);
    const auto k = covariance_kernel_hat(restrict_sample(s, l, restrict_domain(s, l)));
    for (double x : k.k.data()) CHECK(x == 0.0);
  }
  SUBCASE("duplicating every curve") {
    std::mt19937_64 gen(4);
    const auto s = random_sample(gen, 12, 5, 0.3);
    Matrix v2(24, 5);
    MaskMatrix m2(24, 5);
    std::vector<Group> g2;
    const auto l = alternating(12);
    for (std::size_t i = 0; i < 24; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        v2(i, j) = s.value(i % 12, j);
        m2(i, j) = s.mask()(i % 12, j);
      }
      g2.push_back(l[i % 12]);
    }
    const FunctionalSample s2(s.grid(), v2, m2);
    const GroupLabels l2(g2, {});
    const auto sub = restrict_domain(s, l);
    const auto k1 = covariance_kernel_hat(restrict_sample(s, l, sub));
    const auto k2 = covariance_kernel_hat(restrict_sample(s2, l2, sub));
    const double scale = max_abs(k1.k.data());
    for (std::size_t i = 0; i < k1.k.data().size(); ++i) {
      CHECK(close(k1.k.data()[i], k2.k.data()[i], 1e-12, scale));
    }
  }
  SUBCASE("complete design is positive semidefinite") {
    std::mt19937_64 gen(5);
    const auto s = random_sample(gen, 20, 15, 0.0);
    const auto l = alternating(20);
    const auto k = covariance_kernel_hat(restrict_sample(s, l, restrict_domain(s, l)));
    const auto e = sym_eig(k.k, false);
    for (double x : e.values) CHECK(x >= -1e-10 * e.values.front());
    for (std::size_t a = 0; a < 15; ++a)
      for (std::size_t b = 0; b < 15; ++b) CHECK(k.k(a, b) == k.k(b, a));
  }
}

TEST_CASE("rho: symmetry, duplicated points and boundary levels") {
  std::mt19937_64 gen(6);
  const auto s = random_sample(gen, 30, 6, 0.3);
  const auto l = alternating(30);
  const auto data = restrict_sample(s, l, restrict_domain(s, l));
  const std::vector<McPoint> pts{{1, 0.2}, {3, -0.5}, {1, 0.2}, {0, -50.0}, {2, -60.0}};
  const auto R = rho_hat(data, pts);
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = 0; b < pts.size(); ++b) {
      CHECK(R.rho(a, b) == R.rho(b, a));
      CHECK(R.rho(0, b) == R.rho(2, b));
      CHECK(std::isfinite(R.rho(a, b)));
    }
  }
  // below every observation: all centred indicators are -F = 0
  CHECK(R.rho(3, 3) == 0.0);
  CHECK(R.rho(3, 4) == 0.0);
  CHECK_THROWS_AS(rho_hat(data, std::vector<McPoint>{{0, 0.0}}), InputError);
  CHECK_THROWS_AS(rho_hat(data, std::vector<McPoint>{{0, 0.0}, {99, 0.0}}), InputError);
}

TEST_CASE("Monte Carlo points lie on the subdomain and are reproducible") {
  std::mt19937_64 gen(7);
  const auto s = random_sample(gen, 30, 9, 0.3);
  const auto l = alternating(30);
  const auto data = restrict_sample(s, l, restrict_domain(s, l));
  const NuMeasure nu{0.5, 4.0};
  auto r1 = RandomSource(3).stream("rho-points");
  auto r2 = RandomSource(3).stream("rho-points");
  const auto p1 = draw_mc_points(data, nu, 500, r1);
  const auto p2 = draw_mc_points(data, nu, 500, r2);
  double mean = 0;
  for (std::size_t k = 0; k < p1.size(); ++k) {
    CHECK(p1[k].column < data.m);
    CHECK(p1[k].column == p2[k].column);
    CHECK(p1[k].z == p2[k].z);
    mean += p1[k].z / 500.0;
  }
  CHECK(std::abs(mean - 0.5) < 4 * 2.0 / std::sqrt(500.0));
}

TEST_CASE("nu: degenerate scale, shift behaviour, too few observations") {
  Matrix c(4, 3, 2.5);
  const FunctionalSample constant(Grid::equispaced(3), c, MaskMatrix(4, 3, 1));
  const auto l = alternating(4);
  const auto cdata = restrict_sample(constant, l, restrict_domain(constant, l));
  try {
    estimate_nu(cdata);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == "degenerate_scale");
  }

  std::mt19937_64 gen(8);
  const auto s = random_sample(gen, 25, 7, 0.2);
  const auto l25 = alternating(25);
  Matrix shifted = s.values();
  for (double& x : shifted.data()) x -= 4.0;
  const FunctionalSample t(s.grid(), shifted, s.mask());
  const auto sub = restrict_domain(s, l25);
  const auto n1 = estimate_nu(restrict_sample(s, l25, sub));
  const auto n2 = estimate_nu(restrict_sample(t, l25, sub));
  CHECK(n2.theta == doctest::Approx(n1.theta - 4.0).epsilon(1e-12));
  CHECK(n2.tau2 == doctest::Approx(n1.tau2).epsilon(1e-10));
  CHECK(estimate_nu(s, sub).theta == doctest::Approx(n1.theta).epsilon(1e-14));
}

TEST_CASE("group_mean reports a group unobserved at a kept column") {
  Matrix v(4, 2, 1.0);
  MaskMatrix m(4, 2, 1);
  m(1, 1) = 0;
  m(3, 1) = 0;
  v(1, 1) = v(3, 1) = kMissingValue;
  const FunctionalSample s(Grid::equispaced(2), v, m);
  const auto l = alternating(4);
  const auto data = restrict_sample(s, l, SubdomainIndex{{0, 1}, 0.1});
  try {
    group_mean(data, Group::B);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(e.kind() == "degenerate_column");
  }
}

TEST_CASE("default z grid spans the data with a quarter-tau margin") {
  std::mt19937_64 gen(9);
  const auto s = random_sample(gen, 20, 5, 0.2);
  const auto l = alternating(20);
  const auto data = restrict_sample(s, l, restrict_domain(s, l));
  const auto nu = estimate_nu(data);
  const auto z = default_z_grid(data, nu);
  REQUIRE(z.size() == 101);
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < data.n; ++i)
    for (std::size_t j = 0; j < data.m; ++j)
      if (data.mask(i, j)) {
        lo = std::min(lo, data.values(i, j));
        hi = std::max(hi, data.values(i, j));
      }
  CHECK(z.front() == doctest::Approx(lo - 0.25 * std::sqrt(nu.tau2)));
  CHECK(z.back() == doctest::Approx(hi + 0.25 * std::sqrt(nu.tau2)));
  CHECK(std::is_sorted(z.begin(), z.end()));
}
