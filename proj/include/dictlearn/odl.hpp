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
#include <functional>
#include <optional>
#include <vector>

#include "dictlearn/gen_model.hpp"
#include "dictlearn/matrix.hpp"

namespace dictlearn {

// Per-iteration metrics. Fields that need the ground truth are empty when it
// is unknown. `contraction` is empty at iteration 0.
struct TraceRecord {
  std::size_t iter = 0;
  std::optional<double> dict_err_fro;
  std::optional<double> dict_err_aligned;
  std::optional<double> code_err_fro;
  // ||X - X*||_F / ||X*||_2
  std::optional<double> code_err_normalized;
  std::optional<std::size_t> support_mismatch;
  std::optional<double> contraction;
  // ||D^(t+1) - D^(t)||_F
  std::optional<double> step_distance;
  // ||P A* - L((A* A*^T)^{-1})^T A*||_F, preconditioned solvers only.
  std::optional<double> precond_err;
  double elapsed_ms = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct WarmupOptions {
  // Starting threshold; empty means 1.01 * max|Y|.
  std::optional<double> zeta0;
  double beta = 0.98;
  std::size_t max_iters = 200;
};

struct OdlOptions {
  double zeta = 0.5;
  std::size_t max_iters = 100;
  double stop_tol = 1e-12;
  std::optional<WarmupOptions> warmup;

  void validate() const;
};

struct OdlStep {
  Matrix x;       // HT_zeta(D^T Y)
  Matrix d_next;  // Polar(Y X^T)
};

// One alternating-minimization step. `d` must be orthogonal within 1e-8.
OdlStep odl_step(const Matrix& y, const Matrix& d, double zeta);

struct Alignment {
  double distance = 0.0;
  // Column permutation[j] of d is matched to column j of d_star with sign
  // signs[j]: d(:, permutation[j]) * signs[j] ~ d_star(:, j).
  std::vector<std::size_t> permutation;
  std::vector<double> signs;
};

// Distance from d to d_star modulo signed column permutations. The matching
// maximizes sum_j |<d(:, pi(j)), d_star(:, j)>|, which minimizes the
// Frobenius distance exactly.
Alignment aligned_distance(const Matrix& d, const Matrix& d_star);

// Rows of `x` reordered and re-signed to match an alignment of its
// dictionary, so that D X = (D Pi S)((Pi S)^T X).
Matrix align_code(const Matrix& x, const Alignment& alignment);

// Size of the symmetric difference of the supports.
std::size_t support_mismatch(const Matrix& x, const Matrix& x_star);

struct WarmupResult {
  Matrix dictionary;
  std::size_t iterations = 0;
  std::vector<double> thresholds;  // zeta_t used at each iteration
  std::vector<TraceRecord> traces;
};

// Diminishing-threshold warm-up from D = I. Stops after max_iters or once
// the threshold reaches the main-phase zeta.
WarmupResult warmup(const Matrix& y, const OdlOptions& opts,
                    const GroundTruth* truth = nullptr,
                    const TraceSink& sink = {});

struct OdlResult {
  Matrix dictionary;
  Matrix code;
  std::vector<TraceRecord> traces;
  std::size_t iterations = 0;
  std::size_t warmup_iterations = 0;
  bool converged = false;
};

// Alternating minimization for an orthogonal dictionary. When opts.warmup is
// set, d0 is ignored and the warm-up output is used instead; warm-up traces
// come first in the result.
OdlResult run_odl(const Matrix& y, const Matrix& d0, const OdlOptions& opts,
                  const GroundTruth* truth = nullptr,
                  const TraceSink& sink = {});

}  // namespace dictlearn
