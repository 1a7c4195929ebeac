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

#include "dictlearn/odl.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dictlearn/linalg.hpp"
#include "trace_util.hpp"

namespace dictlearn {
namespace detail {

void fill_dictionary_metrics(TraceRecord& rec, const Matrix& dict,
                             const Matrix& reference,
                             Alignment* alignment_out) {
  rec.dict_err_fro = frobenius_distance(dict, reference);
  Alignment al = aligned_distance(dict, reference);
  rec.dict_err_aligned = al.distance;
  if (alignment_out != nullptr) *alignment_out = std::move(al);
}

void fill_code_metrics(TraceRecord& rec, const Matrix& code,
                       const Alignment& alignment, const Matrix& code_star,
                       double code_star_spectral_norm) {
  const Matrix aligned = align_code(code, alignment);
  const double err = frobenius_distance(aligned, code_star);
  rec.code_err_fro = err;
  if (code_star_spectral_norm > 0.0) {
    rec.code_err_normalized = err / code_star_spectral_norm;
  }
  rec.support_mismatch = support_mismatch(aligned, code_star);
}

void fill_contraction(TraceRecord& rec,
                      const std::optional<double>& prev_err) {
  if (prev_err && rec.dict_err_fro && *prev_err > 0.0) {
    rec.contraction = *rec.dict_err_fro / *prev_err;
  }
}

void emit(std::vector<TraceRecord>& traces, const TraceSink& sink,
          TraceRecord rec) {
  if (sink) sink(rec);
  traces.push_back(std::move(rec));
}

}  // namespace detail

namespace {

// Maximum-weight perfect matching on an n x n weight matrix (Hungarian
// algorithm, O(n^3)). Returns match[j] = row assigned to column j.
std::vector<std::size_t> max_weight_assignment(const Matrix& w) {
  const std::size_t n = w.rows();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials over rows (u) and columns (v); cost = -weight.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -w(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> match(n);
  for (std::size_t j = 1; j <= n; ++j) match[j - 1] = p[j] - 1;
  return match;
}

void require_orthogonal(const Matrix& d, double tol, const char* what) {
  if (!d.is_square()) {
    fail(ErrorKind::kDimensionMismatch,
         std::string(what) + ": dictionary must be square");
  }
  const double defect = linalg::orthogonality_defect(d);
  if (!(defect <= tol)) {
    fail(ErrorKind::kInvalidArgument,
         std::string(what) + ": dictionary is not orthogonal (defect " +
             std::to_string(defect) + ")");
  }
}

double spectral_norm(const Matrix& m) {
  const Vector s = linalg::singular_values(m);
  return s.empty() ? 0.0 : s.front();
}

}  // namespace

void OdlOptions::validate() const {
  if (!(zeta > 0.0)) fail(ErrorKind::kInvalidArgument, "zeta must be > 0");
  if (!(stop_tol >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "stop_tol must be >= 0");
  }
  if (warmup) {
    if (!(warmup->beta > 0.0 && warmup->beta < 1.0)) {
      fail(ErrorKind::kInvalidArgument, "warm-up beta must be in (0, 1)");
    }
    if (warmup->zeta0 && !(*warmup->zeta0 > 0.0)) {
      fail(ErrorKind::kInvalidArgument, "warm-up zeta0 must be > 0");
    }
  }
}

OdlStep odl_step(const Matrix& y, const Matrix& d, double zeta) {
  if (d.rows() != y.rows()) {
    fail(ErrorKind::kDimensionMismatch, "odl_step: dictionary/signal rows");
  }
  require_orthogonal(d, 1e-8, "odl_step");
  OdlStep step;
  step.x = linalg::matmul_tn(d, y);
  linalg::hard_threshold_in_place(step.x, zeta);
  step.d_next = linalg::polar(linalg::matmul_nt(y, step.x));
  return step;
}

Alignment aligned_distance(const Matrix& d, const Matrix& d_star) {
  require_same_shape(d, d_star, "aligned_distance");
  if (!d.is_square()) {
    fail(ErrorKind::kDimensionMismatch, "aligned_distance: square required");
  }
  const std::size_t n = d.cols();
  const Matrix inner = linalg::matmul_tn(d, d_star);  // (i, j) = <d_i, d*_j>
  Matrix weight(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) weight(i, j) = std::fabs(inner(i, j));
  }
  Alignment al;
  al.permutation = max_weight_assignment(weight);
  al.signs.resize(n);
  Matrix aligned(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = al.permutation[j];
    al.signs[j] = inner(src, j) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) {
      aligned(r, j) = al.signs[j] * d(r, src);
    }
  }
  al.distance = frobenius_distance(aligned, d_star);
  return al;
}

Matrix align_code(const Matrix& x, const Alignment& alignment) {
  if (alignment.permutation.size() != x.rows()) {
    fail(ErrorKind::kDimensionMismatch, "align_code: alignment size");
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.rows(); ++j) {
    const auto src = x.row(alignment.permutation[j]);
    auto dst = out.row(j);
    const double s = alignment.signs[j];
    for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = s * src[c];
  }
  return out;
}

std::size_t support_mismatch(const Matrix& x, const Matrix& x_star) {
  require_same_shape(x, x_star, "support_mismatch");
  const auto a = x.data();
  const auto b = x_star.data();
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    count += ((a[i] != 0.0) != (b[i] != 0.0));
  }
  return count;
}

WarmupResult warmup(const Matrix& y, const OdlOptions& opts,
                    const GroundTruth* truth, const TraceSink& sink) {
  opts.validate();
  if (!opts.warmup) {
    fail(ErrorKind::kInvalidArgument, "warmup: warm-up options missing");
  }
  const WarmupOptions& wo = *opts.warmup;
  const std::size_t n = y.rows();
  const double zeta0 = wo.zeta0 ? *wo.zeta0 : 1.01 * y.max_abs();
  const double x_star_norm = truth ? spectral_norm(truth->code) : 0.0;

  detail::Stopwatch clock;
  WarmupResult out;
  out.dictionary = Matrix::identity(n);
  std::optional<double> prev_err;
  for (std::size_t t = 0; t < wo.max_iters; ++t) {
    const double zeta_t = zeta0 * std::pow(wo.beta, static_cast<double>(t));
    if (zeta_t <= opts.zeta) break;
    out.thresholds.push_back(zeta_t);

    Matrix x = linalg::matmul_tn(out.dictionary, y);
    linalg::hard_threshold_in_place(x, zeta_t);

    TraceRecord rec;
    rec.iter = t;
    if (truth != nullptr) {
      Alignment al;
      detail::fill_dictionary_metrics(rec, out.dictionary, truth->dictionary,
                                      &al);
      detail::fill_code_metrics(rec, x, al, truth->code, x_star_norm);
      detail::fill_contraction(rec, prev_err);
      prev_err = rec.dict_err_fro;
    }

    Matrix next = Matrix::identity(n);
    if (!x.all_zero()) {
      try {
        next = linalg::polar(linalg::matmul_nt(y, x));
      } catch (const Error& e) {
        // Too few surviving entries to span all directions; treat like the
        // all-zero code.
        if (e.kind() != ErrorKind::kRankDeficient) throw;
      }
    }
    rec.step_distance = frobenius_distance(next, out.dictionary);
    rec.elapsed_ms = clock.elapsed_ms();
    detail::emit(out.traces, sink, std::move(rec));
    out.dictionary = std::move(next);
    ++out.iterations;
  }
  return out;
}

OdlResult run_odl(const Matrix& y, const Matrix& d0, const OdlOptions& opts,
                  const GroundTruth* truth, const TraceSink& sink) {
  opts.validate();
  OdlResult result;
  Matrix d;
  if (opts.warmup) {
    WarmupResult wu = warmup(y, opts, truth, sink);
    result.warmup_iterations = wu.iterations;
    result.traces = std::move(wu.traces);
    d = std::move(wu.dictionary);
  } else {
    require_orthogonal(d0, 1e-8, "run_odl");
    d = d0;
  }
  if (truth != nullptr) {
    require_same_shape(truth->dictionary, d, "run_odl truth dictionary");
    require_same_shape(truth->code, Matrix(y.rows(), y.cols()),
                       "run_odl truth code");
  }

  const double x_star_norm = truth ? spectral_norm(truth->code) : 0.0;
  std::optional<double> prev_err;
  if (!result.traces.empty()) prev_err = result.traces.back().dict_err_fro;
  detail::Stopwatch clock;

  for (std::size_t t = 0; t < opts.max_iters; ++t) {
    const std::size_t iter = result.warmup_iterations + t;
    OdlStep step;
    try {
      step = odl_step(y, d, opts.zeta);
    } catch (const Error& e) {
      rethrow_with_context(e, "run_odl iteration " + std::to_string(iter));
    }

    TraceRecord rec;
    rec.iter = iter;
    if (truth != nullptr) {
      Alignment al;
      detail::fill_dictionary_metrics(rec, d, truth->dictionary, &al);
      detail::fill_code_metrics(rec, step.x, al, truth->code, x_star_norm);
      detail::fill_contraction(rec, prev_err);
      prev_err = rec.dict_err_fro;
    }
    const double step_dist = frobenius_distance(step.d_next, d);
    rec.step_distance = step_dist;
    rec.elapsed_ms = clock.elapsed_ms();
    detail::emit(result.traces, sink, std::move(rec));

    d = std::move(step.d_next);
    result.code = std::move(step.x);
    result.iterations = t + 1;
    if (step_dist < opts.stop_tol) {
      result.converged = true;
      break;
    }
  }
  result.dictionary = std::move(d);
  return result;
}

}  // namespace dictlearn
