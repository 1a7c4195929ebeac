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

#include "dictlearn/matrix.hpp"

#include <cmath>
#include <string>

#include "dictlearn/kernels.hpp"

namespace dictlearn {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorKind::kDimensionMismatch,
         "matrix data length " + std::to_string(data_.size()) +
             " does not match " + std::to_string(rows_) + "x" +
             std::to_string(cols_));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::kInvalidArgument, "matrix entry is not finite");
    }
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) {
      fail(ErrorKind::kDimensionMismatch, "ragged matrix literal");
    }
    for (double v : r) {
      if (!std::isfinite(v)) {
        fail(ErrorKind::kInvalidArgument, "matrix entry is not finite");
      }
      data_.push_back(v);
    }
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::column_vector(std::span<const double> v) {
  return Matrix(v.size(), 1, Vector(v.begin(), v.end()));
}

Vector Matrix::column(std::size_t j) const {
  Vector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void Matrix::set_column(std::size_t j, std::span<const double> values) {
  if (values.size() != rows_) {
    fail(ErrorKind::kDimensionMismatch, "set_column: length mismatch");
  }
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = values[i];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Matrix Matrix::select_columns(std::span<const std::size_t> indices) const {
  Matrix out(rows_, indices.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    const auto src = row(i);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < indices.size(); ++k) dst[k] = src[indices[k]];
  }
  return out;
}

double Matrix::frobenius_norm() const {
  return std::sqrt(kernels::active().sum_squares(data_.data(), data_.size()));
}

double Matrix::max_abs() const {
  return kernels::active().max_abs(data_.data(), data_.size());
}

std::size_t Matrix::count_nonzero() const {
  std::size_t c = 0;
  for (double v : data_) c += (v != 0.0);
  return c;
}

bool Matrix::all_zero() const {
  for (double v : data_) {
    if (v != 0.0) return false;
  }
  return true;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  kernels::active().axpy(1.0, other.data_.data(), data_.data(), data_.size());
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  kernels::active().axpy(-1.0, other.data_.data(), data_.data(),
                         data_.size());
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  kernels::active().scale(s, data_.data(), data_.size());
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double s, Matrix a) { return a *= s; }

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::kDimensionMismatch,
         std::string(what) + ": " + std::to_string(a.rows()) + "x" +
             std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
             "x" + std::to_string(b.cols()));
  }
}

double frobenius_distance(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "frobenius_distance");
  return std::sqrt(kernels::active().squared_distance(
      a.data().data(), b.data().data(), a.size()));
}

double norm2(std::span<const double> v) {
  return std::sqrt(kernels::active().sum_squares(v.data(), v.size()));
}

LowerTriangular::LowerTriangular(Matrix m) : m_(std::move(m)) {
  if (!m_.is_square()) {
    fail(ErrorKind::kDimensionMismatch, "lower-triangular factor not square");
  }
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    if (!(m_(i, i) > 0.0)) {
      fail(ErrorKind::kInvalidArgument,
           "lower-triangular factor has nonpositive diagonal at " +
               std::to_string(i));
    }
    for (std::size_t j = i + 1; j < m_.cols(); ++j) {
      if (m_(i, j) != 0.0) {
        fail(ErrorKind::kInvalidArgument,
             "lower-triangular factor has nonzero strictly-upper entry");
      }
    }
  }
}

Matrix LowerTriangular::reconstruct() const {
  const std::size_t n = m_.rows();
  const auto& k = kernels::active();
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      // Row i of L has nonzeros in [0, i]; row j in [0, j].
      const double v = k.dot(m_.row(i).data(), m_.row(j).data(), j + 1);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

LowerTriangular LowerTriangular::scaled(double s) const {
  if (!(s > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "factor scale must be positive");
  }
  LowerTriangular out;
  out.m_ = m_;
  out.m_ *= s;
  return out;
}

}  // namespace dictlearn
