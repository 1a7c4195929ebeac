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
#include <cstdint>
#include <vector>

#include "dictlearn/gen_model.hpp"
#include "dictlearn/matrix.hpp"
#include "dictlearn/odl.hpp"

namespace dictlearn {

struct CdlOptions {
  double zeta = 0.5;
  std::size_t batch_size = 0;
  std::size_t max_iters = 100;
  // Stands in for p * theta * sigma^2 when whitening the Gram matrix.
  double scale = 1.0;
  std::uint64_t sampling_seed = 0;
  double stop_tol = 1e-12;

  void validate(std::size_t p) const;
};

struct Preconditioner {
  Matrix p_mat;    // upper triangular, positive diagonal
  Matrix y_tilde;  // p_mat * y
};

// P = L(((1/scale) Y Y^T)^{-1})^T and the whitened data P Y.
Preconditioner build_preconditioner(const Matrix& y, double scale);

// L((A A^T)^{-1})^T A: the orthogonal matrix A is mapped to under its own
// whitening.
Matrix project_init(const Matrix& a0);

// L((A* A*^T)^{-1})^T A* computed from the true dictionary; the target the
// preconditioned iterates approach.
Matrix whitened_truth(const Matrix& a_star);

// Scale heuristic for real data: trace(Y Y^T) / n.
double default_scale(const Matrix& y);

// Batch column indices for iteration `iter` (sorted, without replacement).
std::vector<std::size_t> sample_batch(std::size_t p, std::size_t batch_size,
                                      std::uint64_t seed, std::size_t iter);

struct CdlResult {
  Matrix dictionary;  // P^{-1} D^(T)
  Matrix orthogonal_dictionary;  // D^(T)
  Matrix p_mat;
  std::vector<TraceRecord> traces;
  std::size_t iterations = 0;
  bool converged = false;
};

// Mini-batch alternating minimization for a complete dictionary. Trace
// record t measures P^{-1} D^(t+1), the output had the run stopped there.
CdlResult run_cdl(const Matrix& y, const Matrix& a0, const CdlOptions& opts,
                  const GroundTruth* truth = nullptr,
                  const TraceSink& sink = {});

}  // namespace dictlearn
