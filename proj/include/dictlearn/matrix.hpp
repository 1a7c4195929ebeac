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
#include <initializer_list>
#include <span>
#include <vector>

#include "dictlearn/error.hpp"

namespace dictlearn {

using Vector = std::vector<double>;

// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() = default;
  // Zero-filled rows x cols.
  Matrix(std::size_t rows, std::size_t cols);
  // Takes ownership of row-major `data`; every entry must be finite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  // n x 1 column built from a vector.
  static Matrix column_vector(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> values);

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  Matrix transpose() const;
  // Columns listed in `indices`, in that order.
  Matrix select_columns(std::span<const std::size_t> indices) const;

  double frobenius_norm() const;
  double max_abs() const;
  std::size_t count_nonzero() const;
  bool all_zero() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(double s, Matrix a);

void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

// Frobenius distance between two matrices of equal shape.
double frobenius_distance(const Matrix& a, const Matrix& b);

double norm2(std::span<const double> v);

// Lower-triangular factor with a strictly positive diagonal.
class LowerTriangular {
 public:
  LowerTriangular() = default;
  // Validates the invariants: square, strictly-upper part exactly zero and
  // diagonal strictly positive.
  explicit LowerTriangular(Matrix m);

  std::size_t n() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return m_(i, j);
  }

  // The upper-triangular transpose; this is how preconditioners are used.
  Matrix upper() const { return m_.transpose(); }
  // L * L^T.
  Matrix reconstruct() const;

  LowerTriangular scaled(double s) const;

 private:
  Matrix m_;
};

}  // namespace dictlearn
