// Copyright 2026 The repsel Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>

#include "repsel/types.hpp"

namespace repsel::reduce {

// Eigenpairs of a symmetric matrix, values descending, vectors as
// orthonormal columns in matching order.
struct SymmetricEigen {
  VectorD values;
  MatrixD vectors;
  int sweeps = 0;  // Jacobi sweeps or QL iterations, for diagnostics
};

struct ThinSvd {
  MatrixD u;  // n x r, orthonormal columns
  VectorD s;  // r values, descending, >= 0
  MatrixD v;  // d x r, orthonormal columns
};

inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 100;

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
// tolerance * ||A||_F. Throws DataError if A is not symmetric within 1e-8
// (relative to its largest entry).
SymmetricEigen jacobi_eigh(const MatrixD& a, double tolerance = kJacobiTolerance,
                           int max_sweeps = kJacobiMaxSweeps);

// Householder tridiagonalisation followed by implicit QL. Same contract as
// jacobi_eigh, O(n^3) with a much smaller constant.
SymmetricEigen tridiagonal_eigh(const MatrixD& a);

// Matrices up to this order go through Jacobi; larger ones through the
// tridiagonal solver.
inline constexpr std::size_t kJacobiMaxOrder = 160;

SymmetricEigen symmetric_eigh(const MatrixD& a);

// Thin SVD from the eigendecomposition of the smaller Gram matrix. Singular
// values below 1e-10 * s_max are set to zero and their singular vectors are
// completed to an orthonormal set.
ThinSvd svd_thin(const MatrixD& a);

// Extends the orthonormal columns of `q` to `cols` columns (cols <= rows).
MatrixD complete_orthonormal(const MatrixD& q, Eigen::Index cols);

// Flips each column of `vectors` so that its largest-magnitude entry is
// positive; applies the same flip to `partner` when given.
void canonicalize_signs(MatrixD& vectors, MatrixD* partner = nullptr);

}  // namespace repsel::reduce
