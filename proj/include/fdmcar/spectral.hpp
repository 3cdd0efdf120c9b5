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
#ifndef FDMCAR_SPECTRAL_HPP_
#define FDMCAR_SPECTRAL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "fdmcar/matrix.hpp"

namespace fdmcar {

// Eigenpairs of a symmetric matrix. Values descend; column j of `vectors`
// belongs to values[j] and has its largest-magnitude entry positive.
struct SymEigen {
  std::vector<double> values;
  Matrix vectors;  // empty when only values were requested
};

// Householder tridiagonalization followed by implicit QL. The input is
// symmetrized by averaging; asymmetry beyond 1e-10 relative is an error.
SymEigen sym_eig(const Matrix& a, bool want_vectors = true);

// Cyclic Jacobi rotations: at most 100 sweeps, stops once the off-diagonal
// Frobenius norm falls to 1e-12 of the input's. Slower than sym_eig but
// built on a different algorithm, so the two cross-check each other.
SymEigen sym_eig_jacobi(const Matrix& a);

// Eigenpairs of the integral operator discretized with weight `delta`:
// lambda_j = delta * xi_j and phi_j = v_j / sqrt(delta), so that
// sum_t phi_j(t)^2 * delta = 1.
struct EigenSystem {
  std::vector<double> eigenvalues;         // operator scale, descending
  Matrix eigenfunctions;                   // grid point x component
  std::vector<double> matrix_eigenvalues;  // raw, unclipped
  double quadrature_weight = 0.0;
};

EigenSystem operator_scale(const SymEigen& eig, double delta);

// Smallest q whose leading eigenvalues explain at least `fve` of the
// positive spectrum, capped at q_max. Negative eigenvalues count as zero.
std::size_t truncate_fve(std::span<const double> eigenvalues, double fve,
                         std::size_t q_max);

// max(v, 0) elementwise.
std::vector<double> clip_negative(std::span<const double> values);

}  // namespace fdmcar

#endif  // FDMCAR_SPECTRAL_HPP_
