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

#include "dictlearn/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "dictlearn/kernels.hpp"

namespace dictlearn::linalg {
namespace {

thread_local std::uint64_t g_cubic_ops = 0;

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_square(const Matrix& a, const char* what) {
  if (!a.is_square() || a.rows() == 0) {
    fail(ErrorKind::kDimensionMismatch,
         std::string(what) + ": expected a nonempty square matrix, got " +
             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_symmetric(const Matrix& a, const char* what) {
  const double tol = kSymTol * std::max(a.max_abs(), 1e-300);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      if (std::fabs(a(i, j) - a(j, i)) > tol) {
        fail(ErrorKind::kInvalidArgument,
             std::string(what) + ": matrix is not symmetric");
      }
    }
  }
}

}  // namespace

std::uint64_t cubic_op_count() { return g_cubic_ops; }

Matrix hard_threshold(const Matrix& a, double zeta) {
  Matrix out = a;
  hard_threshold_in_place(out, zeta);
  return out;
}

void hard_threshold_in_place(Matrix& a, double zeta) {
  if (!(zeta >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "hard_threshold: zeta must be >= 0");
  }
  auto d = a.data();
  kernels::active().hard_threshold(d.data(), d.data(), d.size(), zeta);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorKind::kDimensionMismatch, "matmul: inner dimensions differ");
  }
  ++g_cubic_ops;
  const auto& k = kernels::active();
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i).data();
    const auto ai = a.row(i);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      if (ai[l] != 0.0) k.axpy(ai[l], b.row(l).data(), ci, b.cols());
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorKind::kDimensionMismatch, "matmul_tn: row counts differ");
  }
  ++g_cubic_ops;
  const auto& k = kernels::active();
  Matrix c(a.cols(), b.cols());
  for (std::size_t l = 0; l < a.rows(); ++l) {
    const auto al = a.row(l);
    const double* bl = b.row(l).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      if (al[i] != 0.0) k.axpy(al[i], bl, c.row(i).data(), b.cols());
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorKind::kDimensionMismatch, "matmul_nt: column counts differ");
  }
  ++g_cubic_ops;
  const auto& k = kernels::active();
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      c(i, j) = k.dot(ai, b.row(j).data(), a.cols());
    }
  }
  return c;
}

Matrix gram(const Matrix& a) {
  ++g_cubic_ops;
  const auto& k = kernels::active();
  Matrix c(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = k.dot(a.row(i).data(), a.row(j).data(), a.cols());
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    fail(ErrorKind::kDimensionMismatch, "matvec: length mismatch");
  }
  const auto& k = kernels::active();
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    y[i] = k.dot(a.row(i).data(), x.data(), x.size());
  }
  return y;
}

Vector matvec_t(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) {
    fail(ErrorKind::kDimensionMismatch, "matvec_t: length mismatch");
  }
  const auto& k = kernels::active();
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] != 0.0) k.axpy(x[i], a.row(i).data(), y.data(), a.cols());
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorKind::kDimensionMismatch, "dot: length mismatch");
  }
  return kernels::active().dot(a.data(), b.data(), a.size());
}

Matrix polar(const Matrix& a) {
  require_square(a, "polar");
  ++g_cubic_ops;
  const Eigen::Map<const RowMajorMatrix> m(a.data().data(),
                                           static_cast<Eigen::Index>(a.rows()),
                                           static_cast<Eigen::Index>(a.cols()));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU |
                                            Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smax > 0.0) || smin <= kRankTol * smax) {
    fail(ErrorKind::kRankDeficient,
         "polar: matrix is numerically rank deficient (sigma_min=" +
             std::to_string(smin) + ", sigma_max=" + std::to_string(smax) +
             ")");
  }
  const RowMajorMatrix q = svd.matrixU() * svd.matrixV().transpose();
  return Matrix(a.rows(), a.cols(),
                std::vector<double>(q.data(), q.data() + q.size()));
}

LowerTriangular cholesky(const Matrix& a) {
  require_square(a, "cholesky");
  require_symmetric(a, "cholesky");
  ++g_cubic_ops;
  const std::size_t n = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, a(i, i));
  const double pivot_floor = kPdTol * max_diag;

  const auto& k = kernels::active();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = l.row(i).data();
    for (std::size_t j = 0; j < i; ++j) {
      const double s = a(i, j) - k.dot(li, l.row(j).data(), j);
      l(i, j) = s / l(j, j);
    }
    const double pivot = a(i, i) - k.dot(li, li, i);
    if (!(pivot > pivot_floor)) {
      fail(ErrorKind::kNotPositiveDefinite,
           "cholesky: pivot " + std::to_string(i) + " is " +
               std::to_string(pivot) + ", matrix is not positive definite");
    }
    l(i, i) = std::sqrt(pivot);
  }
  return LowerTriangular(std::move(l));
}

Vector solve_lower(const Matrix& l, std::span<const double> b) {
  require_square(l, "solve_lower");
  if (b.size() != l.rows()) {
    fail(ErrorKind::kDimensionMismatch, "solve_lower: length mismatch");
  }
  const auto& k = kernels::active();
  Vector x(b.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = (b[i] - k.dot(l.row(i).data(), x.data(), i)) / l(i, i);
  }
  return x;
}

Vector solve_upper(const Matrix& u, std::span<const double> b) {
  require_square(u, "solve_upper");
  if (b.size() != u.rows()) {
    fail(ErrorKind::kDimensionMismatch, "solve_upper: length mismatch");
  }
  const auto& k = kernels::active();
  const std::size_t n = b.size();
  Vector x(n);
  for (std::size_t r = n; r-- > 0;) {
    const double tail =
        k.dot(u.row(r).data() + r + 1, x.data() + r + 1, n - r - 1);
    x[r] = (b[r] - tail) / u(r, r);
  }
  return x;
}

Matrix solve_upper_matrix(const Matrix& u, const Matrix& b) {
  require_square(u, "solve_upper_matrix");
  if (b.rows() != u.rows()) {
    fail(ErrorKind::kDimensionMismatch, "solve_upper_matrix: row mismatch");
  }
  const auto& k = kernels::active();
  const std::size_t n = u.rows();
  Matrix x = b;
  for (std::size_t r = n; r-- > 0;) {
    double* xr = x.row(r).data();
    for (std::size_t c = r + 1; c < n; ++c) {
      if (u(r, c) != 0.0) k.axpy(-u(r, c), x.row(c).data(), xr, x.cols());
    }
    k.scale(1.0 / u(r, r), xr, x.cols());
  }
  return x;
}

Matrix spd_inverse(const Matrix& a) {
  const LowerTriangular l = cholesky(a);
  ++g_cubic_ops;
  const std::size_t n = a.rows();
  const Matrix upper = l.upper();
  Matrix inv(n, n);
  Vector e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const Vector z = solve_lower(l.matrix(), e);
    const Vector x = solve_upper(upper, z);
    inv.set_column(c, x);
    e[c] = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = s;
      inv(j, i) = s;
    }
  }
  return inv;
}

ShermanMorrisonResult sherman_morrison_update(const Matrix& a_inv,
                                              std::span<const double> y) {
  require_square(a_inv, "sherman_morrison_update");
  const Vector u = matvec(a_inv, y);
  const double denom = 1.0 + dot(y, u);
  if (!(denom > 0.0)) {
    fail(ErrorKind::kNotPositiveDefinite,
         "sherman_morrison_update: 1 + y^T A^{-1} y is not positive");
  }
  const double s = 1.0 / std::sqrt(denom);
  Vector v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = s * u[i];

  const auto& k = kernels::active();
  Matrix out = a_inv;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) k.axpy(-v[i], v.data(), out.row(i).data(), v.size());
  }
  return {std::move(out), std::move(v)};
}

LowerTriangular chol_downdate(const LowerTriangular& l,
                              std::span<const double> v) {
  const std::size_t n = l.n();
  if (v.size() != n) {
    fail(ErrorKind::kDimensionMismatch, "chol_downdate: length mismatch");
  }
  const Matrix& src = l.matrix();
  Matrix out(n, n);
  Vector w(v.begin(), v.end());
  double b = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double ljj = src(j, j);
    const double wj = w[j];
    const double diag_sq = ljj * ljj - wj * wj / b;
    if (!(diag_sq > 0.0)) {
      fail(ErrorKind::kDowndateLostPD,
           "chol_downdate: column " + std::to_string(j) +
               " lost positive definiteness");
    }
    const double new_ljj = std::sqrt(diag_sq);
    out(j, j) = new_ljj;
    const double gamma = ljj * ljj * b - wj * wj;
    const double ratio = new_ljj / ljj;
    const double coupling = new_ljj * wj / gamma;
    const double elim = wj / ljj;
    for (std::size_t r = j + 1; r < n; ++r) {
      w[r] -= elim * src(r, j);
      out(r, j) = ratio * src(r, j) - coupling * w[r];
    }
    b -= wj * wj / (ljj * ljj);
  }
  return LowerTriangular(std::move(out));
}

Vector singular_values(const Matrix& a) {
  if (a.empty()) return {};
  ++g_cubic_ops;
  const Eigen::Map<const RowMajorMatrix> m(a.data().data(),
                                           static_cast<Eigen::Index>(a.rows()),
                                           static_cast<Eigen::Index>(a.cols()));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  return Vector(s.data(), s.data() + s.size());
}

double orthogonality_defect(const Matrix& a) {
  Matrix g = matmul_tn(a, a);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return g.frobenius_norm();
}

}  // namespace dictlearn::linalg
