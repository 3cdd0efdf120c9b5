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
#include <numeric>

#include "fdmcar/analysis.hpp"
#include "fdmcar/error.hpp"
#include "fdmcar/mcar_tests.hpp"
#include "fdmcar/simulation.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace fdmcar;

namespace {

struct Moments {
  double mean = 0, var = 0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size() - 1);
  return m;
}

FunctionalSample mcar_sample(std::size_t n, std::size_t p, std::size_t r) {
  ScenarioConfig c;
  c.n = n;
  c.p = p;
  c.seed = 31;
  return scenario_sample(c, r);
}

GroupLabels swapped(const GroupLabels& l) {
  std::vector<Group> g;
  for (std::size_t i = 0; i < l.size(); ++i)
    g.push_back(l[i] == Group::A ? Group::B : Group::A);
  return GroupLabels(g, {PartitionRule::Kind::External, 0.0, "swapped"});
}

}  // namespace

TEST_CASE("p-value counting") {
  const std::vector<double> d{1, 2, 3, 4, 6, 7, 8, 9, 10, 11};
  CHECK(pvalue(5, d) == doctest::Approx(7.0 / 11.0).epsilon(1e-15));
  CHECK(pvalue(100, d) == doctest::Approx(1.0 / 11.0).epsilon(1e-15));
  CHECK(pvalue(-1, d) == 1.0);
  CHECK(pvalue(6, d) == doctest::Approx(7.0 / 11.0).epsilon(1e-15));
  CHECK_THROWS_AS(pvalue(1, std::vector<double>{}), InputError);
}

TEST_CASE("empirical quantile is the ceil(level * B) order statistic") {
  std::vector<double> d(100);
  std::iota(d.begin(), d.end(), 1.0);
  std::reverse(d.begin(), d.end());
  CHECK(empirical_quantile(d, 0.95) == 95.0);
  CHECK(empirical_quantile(d, 0.955) == 96.0);
  CHECK(empirical_quantile(d, 0.001) == 1.0);
  CHECK(empirical_quantile(std::vector<double>{4.0}, 0.95) == 4.0);
  std::vector<double> e(1999);
  std::iota(e.begin(), e.end(), 1.0);
  CHECK(empirical_quantile(e, 0.95) == 1900.0);
  CHECK_THROWS_AS(empirical_quantile(d, 1.0), InputError);
}

TEST_CASE("weighted chi-square limit moments") {
  const RandomSource src(5);
  const std::size_t B = 40000;
  const std::vector<double> lambda{2, 3};
  const auto draws = sample_limit_l2(lambda, 2, B, src);
  const auto m = moments(draws);
  CHECK(std::abs(m.mean - 5.0) < 4 * std::sqrt(26.0 / B));
  CHECK(std::abs(m.var - 26.0) / 26.0 < 0.05);
  for (double x : draws) CHECK(x >= 0.0);

  const std::vector<double> one{1.0};
  const auto chi = moments(sample_limit_l2(one, 1, B, src));
  CHECK(std::abs(chi.mean - 1.0) < 4 * std::sqrt(2.0 / B));

  const std::vector<double> zeros{0.0, 0.0};
  for (double x : sample_limit_l2(zeros, 2, 50, src)) CHECK(x == 0.0);
  CHECK_THROWS_AS(sample_limit_l2(lambda, 3, 10, src), InputError);
  CHECK_THROWS_AS(sample_limit_l2(lambda, 0, 10, src), InputError);
}

TEST_CASE("sup limit: half-normal and sign invariance") {
  const RandomSource src(6);
  const std::size_t B = 40000;
  EigenSystem e;
  e.eigenvalues = {1.0};
  e.eigenfunctions = Matrix(1, 1, 1.0);
  e.quadrature_weight = 1.0;
  const auto m = moments(sample_limit_sup(e, 1, B, src));
  const double mean = std::sqrt(2.0 / M_PI), var = 1.0 - 2.0 / M_PI;
  CHECK(std::abs(m.mean - mean) < 4 * std::sqrt(var / B));

  EigenSystem f;
  f.eigenvalues = {2.0, 0.5};
  f.eigenfunctions = Matrix(3, 2);
  const double phi[3][2] = {{0.3, -1.0}, {1.2, 0.4}, {-0.7, 0.9}};
  for (int t = 0; t < 3; ++t)
    for (int j = 0; j < 2; ++j) f.eigenfunctions(t, j) = phi[t][j];
  EigenSystem g = f;
  for (double& x : g.eigenfunctions.data()) x = -x;
  const auto a = sample_limit_sup(f, 2, 2000, src);
  const auto b = sample_limit_sup(g, 2, 2000, src);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

TEST_CASE("CvM limit with a scaled identity rho") {
  const std::size_t K = 8;
  const double c = 0.2, length = 0.5;
  Matrix r(K, K, 0.0);
  for (std::size_t i = 0; i < K; ++i) r(i, i) = c;
  RhoMatrix rho{r, std::vector<McPoint>(K, McPoint{0, 0.0}), length};
  const auto kappa = cvm_spectrum(rho);
  for (double k : kappa) CHECK(k == doctest::Approx(length * c / K).epsilon(1e-14));
  const std::size_t B = 40000;
  const auto m = moments(sample_limit_cvm(rho, K, B, RandomSource(7)));
  const double var = 2.0 * K * std::pow(length * c / K, 2);
  CHECK(std::abs(m.mean - length * c) < 4 * std::sqrt(var / B));

  RhoMatrix zero{Matrix(K, K, 0.0), rho.mc_points, length};
  for (double x : sample_limit_cvm(zero, 1, 20, RandomSource(7))) CHECK(x == 0.0);
}

TEST_CASE("limit draws do not depend on the thread count") {
  const std::vector<double> lambda{1.0, 0.5, 0.25};
  const RandomSource src(8);
  CHECK(sample_limit_l2(lambda, 3, 3001, src, 1) == sample_limit_l2(lambda, 3, 3001, src, 4));
}

TEST_CASE("bands: single draw, scaling and duality with the sup test") {
  const auto m = fixtures::load_micro().front();
  const auto s = fixtures::to_sample(m);
  const auto l = fixtures::to_labels(m);
  const auto data = restrict_sample(s, l, restrict_domain(s, l));
  const auto one = make_band(data, std::vector<double>{3.0}, 0.95, Calibration::Bootstrap);
  CHECK(one.quantile == 3.0);
  CHECK(one.half_width == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(one.center == std::vector<double>{-4, -5});
  CHECK_FALSE(one.contains_zero());
  const auto wide = make_band(data, std::vector<double>{10.0}, 0.95, Calibration::Bootstrap);
  CHECK(wide.contains_zero());

  std::size_t rejected = 0;
  for (std::size_t r = 0; r < 12; ++r) {
    CAPTURE(r);
    const auto x = mcar_sample(60, 40, r);
    TestConfig cfg;
    cfg.bstar = 1999;
    cfg.seed = r;
    McarAnalysis an(x, partition_complete(x), cfg);
    const auto test = an.run(Method::Sup, Calibration::Asymptotic);
    const auto band = an.band(0.95, Calibration::Asymptotic);
    CHECK(band.half_width * std::sqrt(double(band.n)) ==
          doctest::Approx(band.quantile).epsilon(1e-14));
    CHECK((test.p_value <= 0.05) == !band.contains_zero());
    rejected += test.p_value <= 0.05;
  }
  CHECK(rejected <= 6);
}

TEST_CASE("statistics are symmetric in the group labels") {
  const std::vector<double> z{-1.0, -0.2, 0.0, 0.4, 1.3};
  for (std::size_t r = 0; r < 5; ++r) {
    const auto x = mcar_sample(40, 30, r);
    const auto l = partition_complete(x);
    const auto sub = restrict_domain(x, l);
    const auto a = restrict_sample(x, l, sub);
    const auto b = restrict_sample(x, swapped(l), sub);
    CHECK(stat_l2(a) == doctest::Approx(stat_l2(b)).epsilon(1e-13));
    CHECK(stat_sup(a) == doctest::Approx(stat_sup(b)).epsilon(1e-13));
    CHECK(stat_cvm(a, z) == doctest::Approx(stat_cvm(b, z)).epsilon(1e-13));
    CHECK(CvmEvaluator(a, z).statistic() == doctest::Approx(stat_cvm(a, z)).epsilon(1e-12));
  }
}

TEST_CASE("identical groups give zero statistics and p-value one") {
  Matrix v(4, 3);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) v(i, j) = double(i % 2) + 0.5 * double(j);
  const FunctionalSample s(Grid::equispaced(3), v, MaskMatrix(4, 3, 1));
  const GroupLabels l({Group::A, Group::A, Group::B, Group::B}, {});
  const auto data = restrict_sample(s, l, restrict_domain(s, l));
  CHECK(stat_l2(data) == 0.0);
  CHECK(stat_sup(data) == 0.0);
  CHECK(stat_cvm(data, std::vector<double>{0.3, 1.2}) == 0.0);
  CHECK(pvalue(0.0, std::vector<double>{0.0, 1.0, 2.0}) == 1.0);
}

TEST_CASE("run_test is deterministic in the seed and thread count") {
  const auto x = mcar_sample(50, 25, 3);
  const auto l = partition_complete(x);
  TestConfig cfg;
  cfg.bstar = 500;
  cfg.seed = 99;
  for (Method m : {Method::L2, Method::Sup, Method::CvM}) {
    const auto a = run_test(x, l, m, Calibration::Asymptotic, cfg);
    auto cfg4 = cfg;
    cfg4.threads = 4;
    const auto b = run_test(x, l, m, Calibration::Asymptotic, cfg4);
    CHECK(a.statistic == b.statistic);
    CHECK(a.p_value == b.p_value);
    CHECK(a.draws == b.draws);
    CHECK(a.q_used >= 1);
    CHECK(a.label() == std::string(to_string(m)) + "_asymptotic");
    auto other = cfg;
    other.seed = 100;
    CHECK(run_test(x, l, m, Calibration::Asymptotic, other).draws != a.draws);
  }
}

TEST_CASE("method and calibration names") {
  CHECK(parse_method("L2") == Method::L2);
  CHECK(parse_method("sup") == Method::Sup);
  CHECK(parse_method("cvm") == Method::CvM);
  CHECK_FALSE(parse_method("ks").has_value());
  CHECK(parse_calibration("bootstrap") == Calibration::Bootstrap);
  CHECK_FALSE(parse_calibration("exact").has_value());
}
