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

#include "dictlearn/cdl.hpp"

#include <string>

#include "dictlearn/linalg.hpp"
#include "dictlearn/rng.hpp"
#include "trace_util.hpp"

namespace dictlearn {

void CdlOptions::validate(std::size_t p) const {
  if (!(zeta > 0.0)) fail(ErrorKind::kInvalidArgument, "zeta must be > 0");
  if (!(scale > 0.0)) fail(ErrorKind::kInvalidArgument, "scale must be > 0");
  if (batch_size == 0 || batch_size > p) {
    fail(ErrorKind::kInvalidArgument,
         "batch_size must be in [1, p], got " + std::to_string(batch_size));
  }
  if (!(stop_tol >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "stop_tol must be >= 0");
  }
}

Preconditioner build_preconditioner(const Matrix& y, double scale) {
  if (!(scale > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "build_preconditioner: scale <= 0");
  }
  Matrix g = linalg::gram(y);
  g *= 1.0 / scale;
  Preconditioner out;
  try {
    out.p_mat = linalg::cholesky(linalg::spd_inverse(g)).upper();
  } catch (const Error& e) {
    rethrow_with_context(e, "build_preconditioner (Gram of " +
                                std::to_string(y.cols()) + " samples)");
  }
  out.y_tilde = linalg::matmul(out.p_mat, y);
  return out;
}

Matrix project_init(const Matrix& a0) {
  if (!a0.is_square()) {
    fail(ErrorKind::kDimensionMismatch, "project_init: square required");
  }
  try {
    const Matrix p = linalg::cholesky(linalg::spd_inverse(linalg::gram(a0)))
                         .upper();
    return linalg::matmul(p, a0);
  } catch (const Error& e) {
    rethrow_with_context(e, "project_init");
  }
}

Matrix whitened_truth(const Matrix& a_star) { return project_init(a_star); }

double default_scale(const Matrix& y) {
  if (y.rows() == 0) fail(ErrorKind::kInvalidArgument, "empty data");
  const double energy = y.frobenius_norm();
  return energy * energy / static_cast<double>(y.rows());
}

std::vector<std::size_t> sample_batch(std::size_t p, std::size_t batch_size,
                                      std::uint64_t seed, std::size_t iter) {
  Rng rng = Rng::derive(seed, "cdl-batch", iter);
  return rng.sample_without_replacement(p, batch_size);
}

CdlResult run_cdl(const Matrix& y, const Matrix& a0, const CdlOptions& opts,
                  const GroundTruth* truth, const TraceSink& sink) {
  opts.validate(y.cols());
  if (a0.rows() != y.rows()) {
    fail(ErrorKind::kDimensionMismatch, "run_cdl: a0 rows != signal rows");
  }
  detail::Stopwatch clock;
  CdlResult result;
  Preconditioner pre = build_preconditioner(y, opts.scale);
  Matrix d = project_init(a0);

  std::optional<double> precond_err;
  if (truth != nullptr) {
    require_same_shape(truth->dictionary, a0, "run_cdl truth dictionary");
    precond_err = frobenius_distance(
        linalg::matmul(pre.p_mat, truth->dictionary),
        whitened_truth(truth->dictionary));
  }

  std::optional<double> prev_err;
  for (std::size_t t = 0; t < opts.max_iters; ++t) {
    const auto idx = sample_batch(y.cols(), opts.batch_size,
                                  opts.sampling_seed, t);
    const Matrix batch = opts.batch_size == y.cols()
                             ? pre.y_tilde
                             : pre.y_tilde.select_columns(idx);
    OdlStep step;
    try {
      step = odl_step(batch, d, opts.zeta);
    } catch (const Error& e) {
      rethrow_with_context(e, "run_cdl iteration " + std::to_string(t));
    }
    const double step_dist = frobenius_distance(step.d_next, d);
    d = std::move(step.d_next);

    TraceRecord rec;
    rec.iter = t;
    rec.step_distance = step_dist;
    if (truth != nullptr) {
      const Matrix a = linalg::solve_upper_matrix(pre.p_mat, d);
      detail::fill_dictionary_metrics(rec, a, truth->dictionary);
      detail::fill_contraction(rec, prev_err);
      prev_err = rec.dict_err_fro;
      rec.precond_err = precond_err;
    }
    rec.elapsed_ms = clock.elapsed_ms();
    detail::emit(result.traces, sink, std::move(rec));

    result.iterations = t + 1;
    if (step_dist < opts.stop_tol) {
      result.converged = true;
      break;
    }
  }
  result.dictionary = linalg::solve_upper_matrix(pre.p_mat, d);
  result.orthogonal_dictionary = std::move(d);
  result.p_mat = std::move(pre.p_mat);
  return result;
}

}  // namespace dictlearn
