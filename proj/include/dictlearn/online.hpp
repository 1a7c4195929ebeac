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
#include <deque>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dictlearn/gen_model.hpp"
#include "dictlearn/matrix.hpp"
#include "dictlearn/odl.hpp"

namespace dictlearn {

// Mutable state of the streaming preconditioner.
//   gram     = sum of y y^T over absorbed samples
//   z_inv    = gram^{-1}
//   l_factor = chol(count * theta_sigma2 * z_inv)
// The preconditioner applied to data is l_factor^T.
struct PreconditionerState {
  Matrix gram;
  Matrix z_inv;
  LowerTriangular l_factor;
  std::size_t count = 0;
  double theta_sigma2 = 1.0;

  Matrix p_mat() const { return l_factor.upper(); }

  // Largest relative residual of the two state invariants:
  //   ||z_inv gram - I||_F / sqrt(n)
  //   ||l l^T - count theta_sigma2 z_inv||_F / ||count theta_sigma2 z_inv||_F
  double invariant_residual() const;
};

PreconditionerState init_state(const Matrix& y_init, double theta_sigma2);

// Absorbs one sample in O(n^2): Sherman-Morrison on z_inv, then a triangular
// downdate of the unscaled factor and a rescale to the new count.
PreconditionerState update_preconditioner(const PreconditionerState& state,
                                          std::span<const double> y);
// In-place variant used on the hot path.
void update_preconditioner_in_place(PreconditionerState& state,
                                    std::span<const double> y);

// Recomputes z_inv and l_factor from the maintained Gram matrix.
PreconditionerState refresh_state(const PreconditionerState& state);

// Fixed-capacity FIFO of column vectors, oldest first.
class SignalWindow {
 public:
  SignalWindow(std::size_t dimension, std::size_t capacity);

  // Appends `y`; once full, evicts and returns the oldest column.
  std::optional<Vector> push(std::span<const double> y);

  std::size_t size() const noexcept { return columns_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool full() const noexcept { return columns_.size() == capacity_; }
  // dimension x size(), oldest column first.
  Matrix as_matrix() const;

 private:
  std::size_t dimension_;
  std::size_t capacity_;
  std::deque<Vector> columns_;
};

// Pull interface over a sequence of n-dimensional signals.
class SignalStream {
 public:
  virtual ~SignalStream() = default;
  virtual std::size_t dimension() const = 0;
  // The next signal, or nullopt at end of stream.
  virtual std::optional<Vector> next() = 0;
};

// Columns of an in-memory matrix, left to right.
class MatrixColumnStream : public SignalStream {
 public:
  explicit MatrixColumnStream(Matrix m) : m_(std::move(m)) {}
  std::size_t dimension() const override { return m_.rows(); }
  std::optional<Vector> next() override;

 private:
  Matrix m_;
  std::size_t pos_ = 0;
};

// Binary records: a 4-byte little-endian count n of values, then n
// little-endian IEEE-754 doubles. Every record must have the same n.
class BinaryRecordStream : public SignalStream {
 public:
  // `in` must outlive the stream. `dimension` 0 means "take it from the
  // first record".
  explicit BinaryRecordStream(std::istream& in, std::size_t dimension = 0);
  std::size_t dimension() const override;
  std::optional<Vector> next() override;

 private:
  std::optional<Vector> read_record();

  std::istream& in_;
  std::size_t dimension_;
  std::optional<Vector> peeked_;
};

void write_binary_record(std::ostream& out, std::span<const double> y);

struct OnlineOptions {
  double zeta = 0.5;
  std::size_t p1 = 0;  // samples for the initial preconditioner
  std::size_t p2 = 0;  // window length
  std::size_t max_iters = 0;
  double theta_sigma2 = 1.0;
  // Recompute the state from the Gram every k arrivals; empty disables.
  std::optional<std::size_t> refresh_every;

  void validate(std::size_t n) const;
};

struct OnlineResult {
  Matrix dictionary;  // (P^(T-1))^{-1} D^(T)
  Matrix orthogonal_dictionary;
  PreconditionerState state;
  std::vector<TraceRecord> traces;
  std::size_t iterations = 0;
  std::size_t refreshes = 0;
};

// Streaming alternating minimization. Consumes p1 signals for the
// preconditioner, p2 for the window, then one signal per iteration. Trace
// record t measures (P^(t))^{-1} D^(t+1).
OnlineResult run_online(SignalStream& stream, const Matrix& a0,
                        const OnlineOptions& opts,
                        const GroundTruth* truth = nullptr,
                        const TraceSink& sink = {});

}  // namespace dictlearn
