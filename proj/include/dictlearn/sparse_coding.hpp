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

#include <cstddef>
#include <span>
#include <vector>

#include "dictlearn/matrix.hpp"

namespace dictlearn {

// Sparse coefficient vector over a dictionary with `dimension` atoms.
struct SparseCode {
  std::vector<std::size_t> indices;  // strictly increasing
  Vector values;
  std::size_t dimension = 0;

  std::size_t nnz() const noexcept { return indices.size(); }
  Vector to_dense() const;
  static SparseCode from_dense(std::span<const double> dense);
  // Throws InvalidArgument when the invariants do not hold.
  void validate() const;
};

// dict * code.
Vector synthesize(const Matrix& dict, const SparseCode& code);

// HT_zeta((P A)^T P y).
SparseCode code_with_preconditioner(const Matrix& a, const Matrix& p_mat,
                                    std::span<const double> y, double zeta);

// Column-wise code_with_preconditioner for a batch of signals; P A is formed
// once.
std::vector<SparseCode> code_signals_with_preconditioner(const Matrix& a,
                                                         const Matrix& p_mat,
                                                         const Matrix& y,
                                                         double zeta);

// Orthogonal matching pursuit. Atoms are normalized for selection only; the
// returned coefficients are the least-squares fit on the original atoms.
// Stops at k atoms, when ||residual|| <= residual_tol, or when the residual
// has no remaining correlation with any atom.
SparseCode omp(const Matrix& dict, std::span<const double> y, std::size_t k,
               double residual_tol);

// OMP restricted to the rows where `observed` is true. The code applies to
// the full dictionary, so dict * code fills in the unobserved entries.
SparseCode masked_omp(const Matrix& dict, std::span<const double> y,
                      const std::vector<bool>& observed, std::size_t k,
                      double residual_tol);

}  // namespace dictlearn
