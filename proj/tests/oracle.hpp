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

// Straight-from-definition estimators for tiny samples. Deliberately naive:
// every quantity is recomputed from raw cells with explicit loops and shares
// no code with the library.

#ifndef FDMCAR_TESTS_ORACLE_HPP_
#define FDMCAR_TESTS_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Micro {
  std::string name;
  std::vector<double> grid;
  std::vector<std::vector<std::optional<double>>> x;  // curve x grid point
  std::vector<int> g;                                 // 0 = A, 1 = B
  std::vector<double> z_draws;
  std::vector<std::pair<std::size_t, double>> mc;     // (column, z)

  std::size_t n() const { return x.size(); }
  std::size_t p() const { return grid.size(); }
  bool obs(std::size_t i, std::size_t j) const { return x[i][j].has_value(); }
  double val(std::size_t i, std::size_t j) const { return *x[i][j]; }
  double spacing() const {
    return (grid.back() - grid.front()) / static_cast<double>(p() - 1);
  }
};

inline std::vector<std::size_t> kept(const Micro& s, double threshold = 0.1) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < s.p(); ++j) {
    int ca = 0, cb = 0;
    for (std::size_t i = 0; i < s.n(); ++i) {
      if (!s.obs(i, j)) continue;
      if (s.g[i] == 0) ++ca; else ++cb;
    }
    if (std::min(ca, cb) > static_cast<double>(s.n()) * threshold) out.push_back(j);
  }
  return out;
}

inline double phat(const Micro& s, int g, std::size_t j) {
  double c = 0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (s.obs(i, j) && s.g[i] == g) c += 1;
  }
  return c / static_cast<double>(s.n());
}

inline double mu(const Micro& s, int g, std::size_t j) {
  double sum = 0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (s.obs(i, j) && s.g[i] == g) sum += s.val(i, j);
  }
  return sum / (static_cast<double>(s.n()) * phat(s, g, j));
}

inline double ecdf(const Micro& s, int g, std::size_t j, double z) {
  double c = 0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    if (s.obs(i, j) && s.g[i] == g && s.val(i, j) <= z) c += 1;
  }
  return c / (static_cast<double>(s.n()) * phat(s, g, j));
}

inline double kernel(const Micro& s, std::size_t j, std::size_t l) {
  double total = 0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    for (int g = 0; g < 2; ++g) {
      if (s.g[i] != g || !s.obs(i, j) || !s.obs(i, l)) continue;
      const double rj = s.val(i, j) - mu(s, g, j);
      const double rl = s.val(i, l) - mu(s, g, l);
      total += rj * rl / (phat(s, g, j) * phat(s, g, l));
    }
  }
  return total / static_cast<double>(s.n());
}

inline double rho(const Micro& s, std::size_t j, double zj, std::size_t l,
                  double zl) {
  double total = 0;
  for (std::size_t i = 0; i < s.n(); ++i) {
    for (int g = 0; g < 2; ++g) {
      if (s.g[i] != g || !s.obs(i, j) || !s.obs(i, l)) continue;
      const double ij = (s.val(i, j) <= zj ? 1.0 : 0.0) - ecdf(s, g, j, zj);
      const double il = (s.val(i, l) <= zl ? 1.0 : 0.0) - ecdf(s, g, l, zl);
      total += ij * il / (phat(s, g, j) * phat(s, g, l));
    }
  }
  return total / static_cast<double>(s.n());
}

inline double stat_l2(const Micro& s) {
  double sum = 0;
  for (std::size_t j : kept(s)) {
    const double d = mu(s, 0, j) - mu(s, 1, j);
    sum += d * d * s.spacing();
  }
  return static_cast<double>(s.n()) * sum;
}

inline double stat_sup(const Micro& s) {
  double sup = 0;
  for (std::size_t j : kept(s)) sup = std::max(sup, std::abs(mu(s, 0, j) - mu(s, 1, j)));
  return std::sqrt(static_cast<double>(s.n())) * sup;
}

inline double stat_cvm(const Micro& s, const std::vector<double>& z) {
  double sum = 0;
  for (double zm : z) {
    for (std::size_t j : kept(s)) {
      const double d = ecdf(s, 0, j, zm) - ecdf(s, 1, j, zm);
      sum += d * d * s.spacing();
    }
  }
  return static_cast<double>(s.n()) * sum / static_cast<double>(z.size());
}

// Pooled available-case theta (averaged over the kept columns) and tau^2.
inline std::pair<double, double> nu(const Micro& s) {
  const auto k = kept(s);
  double integral = 0, tau2 = 0;
  for (std::size_t j : k) {
    std::vector<double> v;
    for (std::size_t i = 0; i < s.n(); ++i) {
      if (s.obs(i, j)) v.push_back(s.val(i, j));
    }
    double m = 0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double ss = 0;
    for (double a : v) ss += (a - m) * (a - m);
    integral += m * s.spacing();
    tau2 = std::max(tau2, ss / static_cast<double>(v.size() - 1));
  }
  return {integral / (static_cast<double>(k.size()) * s.spacing()), tau2};
}

// The resample in which slot i holds curve source[i] with the label of i.
inline Micro resample(const Micro& s, const std::vector<std::size_t>& source) {
  Micro r = s;
  for (std::size_t i = 0; i < s.n(); ++i) r.x[i] = s.x[source[i]];
  return r;
}

// Mean-test replicate: curves centred by their own group mean, resampled,
// statistics over the original subdomain.
inline std::pair<double, double> mean_replicate(
    const Micro& s, const std::vector<std::size_t>& source) {
  Micro c = s;
  for (std::size_t i = 0; i < s.n(); ++i) {
    for (std::size_t j = 0; j < s.p(); ++j) {
      if (s.obs(i, j)) c.x[i][j] = s.val(i, j) - mu(s, s.g[i], j);
    }
  }
  const Micro r = resample(c, source);
  double l2 = 0, sup = 0;
  for (std::size_t j : kept(s)) {
    const double d = mu(r, 0, j) - mu(r, 1, j);
    l2 += d * d * s.spacing();
    sup = std::max(sup, std::abs(d));
  }
  return {static_cast<double>(s.n()) * l2,
          std::sqrt(static_cast<double>(s.n())) * sup};
}

inline double cvm_replicate(const Micro& s, const std::vector<std::size_t>& source,
                            const std::vector<double>& z) {
  const Micro r = resample(s, source);
  double sum = 0;
  for (double zm : z) {
    for (std::size_t j : kept(s)) {
      const double d = (ecdf(r, 0, j, zm) - ecdf(s, 0, j, zm)) -
                       (ecdf(r, 1, j, zm) - ecdf(s, 1, j, zm));
      sum += d * d * s.spacing();
    }
  }
  return static_cast<double>(s.n()) * sum / static_cast<double>(z.size());
}

}  // namespace oracle

#endif  // FDMCAR_TESTS_ORACLE_HPP_
