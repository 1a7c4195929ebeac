// Copyright 2026 The dictlearn Authors
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

#include <cstdint>
#include <span>

#include "dictlearn/matrix.hpp"

namespace dictlearn::linalg {

// Relative tolerances shared by the factorizations. All are scaled by the
// magnitude of the input (largest singular value or largest diagonal).
inline constexpr double kRankTol = 1e-12;
inline constexpr double kPdTol = 1e-12;
inline constexpr double kSymTol = 1e-10;
inline constexpr double kCholTol = 1e-10;
inline constexpr double kOrthoTol = 1e-10;

// Entrywise hard thresholding: keeps a(i,j) when |a(i,j)| >= zeta.
Matrix hard_threshold(const Matrix& a, double zeta);
void hard_threshold_in_place(Matrix& a, double zeta);

// Products. These are the only O(n^3) dense kernels in the library, along
// with the factorizations below; each call bumps cubic_op_count().
Matrix matmul(const Matrix& a, const Matrix& b);     // a * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // a^T * b
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // a * b^T
Matrix gram(const Matrix& a);                        // a * a^T

// O(n^2) products.
Vector matvec(const Matrix& a, std::span<const double> x);
Vector matvec_t(const Matrix& a, std::span<const double> x);  // a^T * x
double dot(std::span<const double> a, std::span<const double> b);

// Orthogonal polar factor U V^T of the SVD a = U S V^T. Throws RankDeficient
// when sigma_min <= kRankTol * sigma_max.
Matrix polar(const Matrix& a);

// Lower Cholesky factor of a symmetric positive definite matrix.
// Throws NotPositiveDefinite when a pivot falls below kPdTol * max diagonal.
LowerTriangular cholesky(const Matrix& a);

// Inverse of an SPD matrix through its Cholesky factor; the result is
// symmetrized.
Matrix spd_inverse(const Matrix& a);

// Triangular solves. `solve_upper_matrix(u, b)` returns u^{-1} b.
Vector solve_lower(const Matrix& l, std::span<const double> b);
Vector solve_upper(const Matrix& u, std::span<const double> b);
Matrix solve_upper_matrix(const Matrix& u, const Matrix& b);

struct ShermanMorrisonResult {
  Matrix inverse;  // (A + y y^T)^{-1}
  Vector v;        // the rank-one term: inverse = a_inv - v v^T
};

// Given a_inv = A^{-1} (SPD), returns (A + y y^T)^{-1} = a_inv - v v^T with
// v = a_inv y / sqrt(1 + y^T a_inv y). O(n^2).
ShermanMorrisonResult sherman_morrison_update(const Matrix& a_inv,
                                              std::span<const double> y);

// Triangular rank-one downdate: returns L' with L' L'^T = L L^T - v v^T in
// O(n^2). Throws DowndateLostPD when the result would not be positive
// definite.
LowerTriangular chol_downdate(const LowerTriangular& l,
                              std::span<const double> v);

// Singular values in descending order.
Vector singular_values(const Matrix& a);

// ||a^T a - I||_F.
double orthogonality_defect(const Matrix& a);

// Number of O(n^3) operations executed by this thread so far.
std::uint64_t cubic_op_count();

}  // namespace dictlearn::linalg
