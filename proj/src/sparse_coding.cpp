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

#include "dictlearn/sparse_coding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dictlearn/kernels.hpp"
#include "dictlearn/linalg.hpp"

namespace dictlearn {

Vector SparseCode::to_dense() const {
  Vector out(dimension, 0.0);
  for (std::size_t i = 0; i < indices.size(); ++i) out[indices[i]] = values[i];
  return out;
}

SparseCode SparseCode::from_dense(std::span<const double> dense) {
  SparseCode c;
  c.dimension = dense.size();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      c.indices.push_back(i);
      c.values.push_back(dense[i]);
    }
  }
  return c;
}

void SparseCode::validate() const {
  if (indices.size() != values.size()) {
    fail(ErrorKind::kInvalidArgument, "SparseCode: indices/values length");
  }
  if (indices.size() > dimension) {
    fail(ErrorKind::kInvalidArgument, "SparseCode: more entries than atoms");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= dimension ||
        (i > 0 && indices[i] <= indices[i - 1])) {
      fail(ErrorKind::kInvalidArgument,
           "SparseCode: indices must be strictly increasing and in range");
    }
  }
}

Vector synthesize(const Matrix& dict, const SparseCode& code) {
  if (code.dimension != dict.cols()) {
    fail(ErrorKind::kDimensionMismatch, "synthesize: atom count");
  }
  Vector out(dict.rows(), 0.0);
  for (std::size_t r = 0; r < dict.rows(); ++r) {
    double s = 0.0;
    for (std::size_t i = 0; i < code.indices.size(); ++i) {
      s += dict(r, code.indices[i]) * code.values[i];
    }
    out[r] = s;
  }
  return out;
}

SparseCode code_with_preconditioner(const Matrix& a, const Matrix& p_mat,
                                    std::span<const double> y, double zeta) {
  const Matrix y_col = Matrix::column_vector(y);
  auto codes = code_signals_with_preconditioner(a, p_mat, y_col, zeta);
  return std::move(codes.front());
}

std::vector<SparseCode> code_signals_with_preconditioner(const Matrix& a,
                                                         const Matrix& p_mat,
                                                         const Matrix& y,
                                                         double zeta) {
  if (p_mat.rows() != y.rows() || a.rows() != p_mat.cols()) {
    fail(ErrorKind::kDimensionMismatch,
         "code_with_preconditioner: shapes of a, p_mat and y disagree");
  }
  const Matrix pa = linalg::matmul(p_mat, a);
  const Matrix py = linalg::matmul(p_mat, y);
  Matrix c = linalg::matmul_tn(pa, py);
  linalg::hard_threshold_in_place(c, zeta);
  std::vector<SparseCode> out;
  out.reserve(y.cols());
  for (std::size_t j = 0; j < y.cols(); ++j) {
    out.push_back(SparseCode::from_dense(c.column(j)));
  }
  return out;
}

namespace {

// Greedy pursuit over the columns of `dict` (rows already restricted).
// Atoms with zero norm are never selected when `skip_zero_atoms` is set;
// otherwise they are rejected up front.
SparseCode pursuit(const Matrix& dict, std::span<const double> y,
                   std::size_t k, double residual_tol, bool skip_zero_atoms) {
  const std::size_t n = dict.rows();
  const std::size_t m = dict.cols();
  if (y.size() != n) {
    fail(ErrorKind::kDimensionMismatch, "omp: signal length != atom length");
  }
  if (k == 0) fail(ErrorKind::kInvalidArgument, "omp: atom budget must be > 0");
  if (!(residual_tol >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "omp: residual_tol must be >= 0");
  }
  const auto& kern = kernels::active();

  // Column-major copy so each atom is contiguous.
  const Matrix atoms = dict.transpose();
  Vector inv_norm(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double nrm = norm2(atoms.row(j));
    if (nrm > 0.0) {
      inv_norm[j] = 1.0 / nrm;
    } else if (!skip_zero_atoms) {
      fail(ErrorKind::kInvalidArgument,
           "omp: atom " + std::to_string(j) + " is zero");
    }
  }

  SparseCode code;
  code.dimension = m;
  const double y_norm = norm2(y);
  if (y_norm <= residual_tol || y_norm == 0.0) return code;

  std::vector<std::size_t> selected;
  std::vector<bool> used(m, false);
  std::vector<Vector> q;  // orthonormal basis of the selected atoms
  Matrix r_factor(std::min(k, n), std::min(k, n));
  Vector qty;  // Q^T y
  Vector residual(y.begin(), y.end());
  const std::size_t budget = std::min(k, std::min(n, m));

  for (std::size_t step = 0; step < budget; ++step) {
    std::size_t best = m;
    double best_corr = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (used[j] || inv_norm[j] == 0.0) continue;
      const double c =
          std::fabs(kern.dot(atoms.row(j).data(), residual.data(), n)) *
          inv_norm[j];
      if (c > best_corr) {
        best_corr = c;
        best = j;
      }
    }
    // Nothing left to explain.
    if (best == m || best_corr <= 1e-14 * y_norm) break;

    // Orthogonalize the new atom against Q (two passes of Gram-Schmidt).
    Vector w(atoms.row(best).begin(), atoms.row(best).end());
    const double atom_norm = norm2(w);
    Vector coeffs(q.size(), 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < q.size(); ++i) {
        const double c = kern.dot(q[i].data(), w.data(), n);
        coeffs[i] += c;
        kern.axpy(-c, q[i].data(), w.data(), n);
      }
    }
    const double w_norm = norm2(w);
    if (w_norm <= 1e-10 * atom_norm) {
      fail(ErrorKind::kDegenerateSelection,
           "omp: atom " + std::to_string(best) +
               " is numerically dependent on the selected atoms");
    }
    kern.scale(1.0 / w_norm, w.data(), n);

    const std::size_t s = q.size();
    for (std::size_t i = 0; i < s; ++i) r_factor(i, s) = coeffs[i];
    r_factor(s, s) = w_norm;
    used[best] = true;
    selected.push_back(best);

    const double proj = kern.dot(w.data(), y.data(), n);
    qty.push_back(proj);
    // Recompute the residual from scratch against the full basis so it stays
    // orthogonal to the selected atoms.
    q.push_back(std::move(w));
    std::copy(y.begin(), y.end(), residual.begin());
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double c = kern.dot(q[i].data(), residual.data(), n);
      kern.axpy(-c, q[i].data(), residual.data(), n);
    }
    if (norm2(residual) <= residual_tol) break;
  }

  // Back-substitute R c = Q^T y.
  const std::size_t s = selected.size();
  Vector coef(s, 0.0);
  for (std::size_t i = s; i-- > 0;) {
    double acc = qty[i];
    for (std::size_t j = i + 1; j < s; ++j) acc -= r_factor(i, j) * coef[j];
    coef[i] = acc / r_factor(i, i);
  }

  std::vector<std::size_t> order(s);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return selected[a] < selected[b];
  });
  for (std::size_t i : order) {
    code.indices.push_back(selected[i]);
    code.values.push_back(coef[i]);
  }
  return code;
}

}  // namespace

SparseCode omp(const Matrix& dict, std::span<const double> y, std::size_t k,
               double residual_tol) {
  if (k > dict.rows()) {
    fail(ErrorKind::kInvalidArgument,
         "omp: atom budget exceeds the signal dimension");
  }
  return pursuit(dict, y, k, residual_tol, /*skip_zero_atoms=*/false);
}

SparseCode masked_omp(const Matrix& dict, std::span<const double> y,
                      const std::vector<bool>& observed, std::size_t k,
                      double residual_tol) {
  if (observed.size() != dict.rows() || y.size() != dict.rows()) {
    fail(ErrorKind::kDimensionMismatch, "masked_omp: mask/signal length");
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (observed[i]) rows.push_back(i);
  }
  if (rows.size() < k) {
    fail(ErrorKind::kInsufficientObservations,
         "masked_omp: " + std::to_string(rows.size()) +
             " observed entries for an atom budget of " + std::to_string(k));
  }
  Matrix sub(rows.size(), dict.cols());
  Vector y_sub(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = dict.row(rows[r]);
    std::copy(src.begin(), src.end(), sub.row(r).begin());
    y_sub[r] = y[rows[r]];
  }
  return pursuit(sub, y_sub, k, residual_tol, /*skip_zero_atoms=*/true);
}

}  // namespace dictlearn
