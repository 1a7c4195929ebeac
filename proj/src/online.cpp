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

#include "dictlearn/online.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "dictlearn/cdl.hpp"
#include "dictlearn/kernels.hpp"
#include "dictlearn/linalg.hpp"
#include "trace_util.hpp"

namespace dictlearn {

double PreconditionerState::invariant_residual() const {
  const std::size_t n = gram.rows();
  Matrix prod = linalg::matmul(z_inv, gram);
  for (std::size_t i = 0; i < n; ++i) prod(i, i) -= 1.0;
  const double inverse_res =
      prod.frobenius_norm() / std::sqrt(static_cast<double>(n));

  Matrix target = z_inv;
  target *= static_cast<double>(count) * theta_sigma2;
  const double factor_res =
      frobenius_distance(l_factor.reconstruct(), target) /
      target.frobenius_norm();
  return std::max(inverse_res, factor_res);
}

PreconditionerState init_state(const Matrix& y_init, double theta_sigma2) {
  if (!(theta_sigma2 > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "init_state: theta_sigma2 must be > 0");
  }
  if (y_init.cols() < y_init.rows()) {
    fail(ErrorKind::kNotPositiveDefinite,
         "init_state: " + std::to_string(y_init.cols()) +
             " samples cannot give a positive definite Gram in dimension " +
             std::to_string(y_init.rows()));
  }
  PreconditionerState s;
  s.gram = linalg::gram(y_init);
  s.count = y_init.cols();
  s.theta_sigma2 = theta_sigma2;
  try {
    s.z_inv = linalg::spd_inverse(s.gram);
    Matrix scaled = s.z_inv;
    scaled *= static_cast<double>(s.count) * theta_sigma2;
    s.l_factor = linalg::cholesky(scaled);
  } catch (const Error& e) {
    rethrow_with_context(e, "init_state");
  }
  return s;
}

void update_preconditioner_in_place(PreconditionerState& state,
                                    std::span<const double> y) {
  const std::size_t n = state.gram.rows();
  if (y.size() != n) {
    fail(ErrorKind::kDimensionMismatch, "update_preconditioner: length");
  }
  auto sm = linalg::sherman_morrison_update(state.z_inv, y);

  const double old_scale =
      std::sqrt(static_cast<double>(state.count) * state.theta_sigma2);
  const double new_scale =
      std::sqrt(static_cast<double>(state.count + 1) * state.theta_sigma2);
  const LowerTriangular unscaled = state.l_factor.scaled(1.0 / old_scale);
  const LowerTriangular downdated = linalg::chol_downdate(unscaled, sm.v);

  // Commit only after every fallible step succeeded.
  state.l_factor = downdated.scaled(new_scale);
  state.z_inv = std::move(sm.inverse);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    if (y[i] != 0.0) k.axpy(y[i], y.data(), state.gram.row(i).data(), n);
  }
  ++state.count;
}

PreconditionerState update_preconditioner(const PreconditionerState& state,
                                          std::span<const double> y) {
  PreconditionerState out = state;
  update_preconditioner_in_place(out, y);
  return out;
}

PreconditionerState refresh_state(const PreconditionerState& state) {
  PreconditionerState out = state;
  try {
    out.z_inv = linalg::spd_inverse(state.gram);
    Matrix scaled = out.z_inv;
    scaled *= static_cast<double>(state.count) * state.theta_sigma2;
    out.l_factor = linalg::cholesky(scaled);
  } catch (const Error& e) {
    rethrow_with_context(e, "refresh_state");
  }
  return out;
}

SignalWindow::SignalWindow(std::size_t dimension, std::size_t capacity)
    : dimension_(dimension), capacity_(capacity) {
  if (capacity == 0) {
    fail(ErrorKind::kInvalidArgument, "SignalWindow: capacity must be > 0");
  }
}

std::optional<Vector> SignalWindow::push(std::span<const double> y) {
  if (y.size() != dimension_) {
    fail(ErrorKind::kDimensionMismatch, "SignalWindow::push: length");
  }
  columns_.emplace_back(y.begin(), y.end());
  if (columns_.size() <= capacity_) return std::nullopt;
  Vector evicted = std::move(columns_.front());
  columns_.pop_front();
  return evicted;
}

Matrix SignalWindow::as_matrix() const {
  Matrix m(dimension_, columns_.size());
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    m.set_column(j, columns_[j]);
  }
  return m;
}

std::optional<Vector> MatrixColumnStream::next() {
  if (pos_ >= m_.cols()) return std::nullopt;
  return m_.column(pos_++);
}

BinaryRecordStream::BinaryRecordStream(std::istream& in, std::size_t dimension)
    : in_(in), dimension_(dimension) {
  if (dimension_ == 0) {
    peeked_ = read_record();
    if (!peeked_) {
      fail(ErrorKind::kStreamExhausted, "binary stream is empty");
    }
    dimension_ = peeked_->size();
  }
}

std::size_t BinaryRecordStream::dimension() const { return dimension_; }

std::optional<Vector> BinaryRecordStream::read_record() {
  std::array<unsigned char, 4> len_bytes{};
  in_.read(reinterpret_cast<char*>(len_bytes.data()), 4);
  if (in_.gcount() == 0) return std::nullopt;
  if (in_.gcount() != 4) {
    fail(ErrorKind::kFormat, "binary stream: truncated record header");
  }
  const std::uint32_t len = static_cast<std::uint32_t>(len_bytes[0]) |
                            static_cast<std::uint32_t>(len_bytes[1]) << 8 |
                            static_cast<std::uint32_t>(len_bytes[2]) << 16 |
                            static_cast<std::uint32_t>(len_bytes[3]) << 24;
  if (dimension_ != 0 && len != dimension_) {
    fail(ErrorKind::kFormat, "binary stream: record length " +
                                 std::to_string(len) + ", expected " +
                                 std::to_string(dimension_));
  }
  Vector y(len);
  for (std::uint32_t i = 0; i < len; ++i) {
    std::array<unsigned char, 8> b{};
    in_.read(reinterpret_cast<char*>(b.data()), 8);
    if (in_.gcount() != 8) {
      fail(ErrorKind::kFormat, "binary stream: truncated record body");
    }
    std::uint64_t bits = 0;
    for (int k = 7; k >= 0; --k) bits = (bits << 8) | b[k];
    y[i] = std::bit_cast<double>(bits);
    if (!std::isfinite(y[i])) {
      fail(ErrorKind::kFormat, "binary stream: non-finite value");
    }
  }
  return y;
}

std::optional<Vector> BinaryRecordStream::next() {
  if (peeked_) {
    std::optional<Vector> out = std::move(peeked_);
    peeked_.reset();
    return out;
  }
  return read_record();
}

void write_binary_record(std::ostream& out, std::span<const double> y) {
  const auto len = static_cast<std::uint32_t>(y.size());
  for (int k = 0; k < 4; ++k) out.put(static_cast<char>((len >> (8 * k)) & 0xff));
  for (double v : y) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) {
      out.put(static_cast<char>((bits >> (8 * k)) & 0xff));
    }
  }
}

void OnlineOptions::validate(std::size_t n) const {
  if (!(zeta > 0.0)) fail(ErrorKind::kInvalidArgument, "zeta must be > 0");
  if (p1 < n) {
    fail(ErrorKind::kInvalidArgument, "p1 must be at least the dimension");
  }
  if (p2 == 0) fail(ErrorKind::kInvalidArgument, "p2 must be > 0");
  if (!(theta_sigma2 > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "theta_sigma2 must be > 0");
  }
  if (refresh_every && *refresh_every == 0) {
    fail(ErrorKind::kInvalidArgument, "refresh_every must be > 0");
  }
}

namespace {

Vector pull(SignalStream& stream, const std::string& what) {
  std::optional<Vector> y = stream.next();
  if (!y) fail(ErrorKind::kStreamExhausted, "stream ended during " + what);
  return std::move(*y);
}

}  // namespace

OnlineResult run_online(SignalStream& stream, const Matrix& a0,
                        const OnlineOptions& opts, const GroundTruth* truth,
                        const TraceSink& sink) {
  const std::size_t n = stream.dimension();
  opts.validate(n);
  if (a0.rows() != n || !a0.is_square()) {
    fail(ErrorKind::kDimensionMismatch, "run_online: a0 must be n x n");
  }
  detail::Stopwatch clock;

  Matrix y_init(n, opts.p1);
  for (std::size_t j = 0; j < opts.p1; ++j) {
    y_init.set_column(j, pull(stream, "preconditioner initialization"));
  }
  OnlineResult result;
  result.state = init_state(y_init, opts.theta_sigma2);

  SignalWindow window(n, opts.p2);
  for (std::size_t j = 0; j < opts.p2; ++j) {
    window.push(pull(stream, "window initialization"));
  }

  Matrix d = project_init(a0);
  Matrix a = linalg::solve_upper_matrix(result.state.p_mat(), d);
  const Matrix whitened =
      truth != nullptr ? whitened_truth(truth->dictionary) : Matrix();

  std::optional<double> prev_err;
  for (std::size_t t = 0; t < opts.max_iters; ++t) {
    const std::string where = "run_online iteration " + std::to_string(t);
    const Vector y = pull(stream, where);
    window.push(y);

    try {
      try {
        update_preconditioner_in_place(result.state, y);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kDowndateLostPD) throw;
        result.state = refresh_state(result.state);
        ++result.refreshes;
        update_preconditioner_in_place(result.state, y);
      }
      if (opts.refresh_every && (t + 1) % *opts.refresh_every == 0) {
        result.state = refresh_state(result.state);
        ++result.refreshes;
      }
    } catch (const Error& e) {
      rethrow_with_context(e, where);
    }

    const Matrix p_mat = result.state.p_mat();
    const Matrix y_tilde = linalg::matmul(p_mat, window.as_matrix());
    OdlStep step;
    try {
      step = odl_step(y_tilde, d, opts.zeta);
    } catch (const Error& e) {
      rethrow_with_context(e, where);
    }
    const double step_dist = frobenius_distance(step.d_next, d);
    d = std::move(step.d_next);
    a = linalg::solve_upper_matrix(p_mat, d);

    TraceRecord rec;
    rec.iter = t;
    rec.step_distance = step_dist;
    if (truth != nullptr) {
      detail::fill_dictionary_metrics(rec, a, truth->dictionary);
      detail::fill_contraction(rec, prev_err);
      prev_err = rec.dict_err_fro;
      rec.precond_err = frobenius_distance(
          linalg::matmul(p_mat, truth->dictionary), whitened);
    }
    rec.elapsed_ms = clock.elapsed_ms();
    detail::emit(result.traces, sink, std::move(rec));
    result.iterations = t + 1;
  }
  result.dictionary = std::move(a);
  result.orthogonal_dictionary = std::move(d);
  return result;
}

}  // namespace dictlearn
