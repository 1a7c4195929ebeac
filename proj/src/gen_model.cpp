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

#include "dictlearn/gen_model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "dictlearn/linalg.hpp"
#include "dictlearn/rng.hpp"

namespace dictlearn {
namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

Matrix haar_from(Rng& rng, std::size_t n) {
  const Matrix g = gaussian_matrix(n, n, rng);
  const Eigen::Map<const RowMajorMatrix> gm(g.data().data(),
                                            static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gm);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd& r = qr.matrixQR();
  // Flip columns so R has a positive diagonal; this makes Q Haar.
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return out;
}

}  // namespace

void GenerativeParams::validate() const {
  auto bad = [](const std::string& m) {
    fail(ErrorKind::kInvalidArgument, "GenerativeParams: " + m);
  };
  if (n == 0) bad("n must be positive");
  if (p == 0) bad("p must be positive");
  if (!(theta > 0.0 && theta <= 1.0)) bad("theta must be in (0, 1]");
  if (!(gamma > 0.0)) bad("gamma must be positive");
  if (!(kappa_hat >= 1.0)) bad("kappa_hat must be >= 1");
  if (dict_kind == DictKind::kOrthogonal && kappa_hat != 1.0) {
    bad("kappa_hat must be 1 for an orthogonal dictionary");
  }
  if (dict_kind == DictKind::kComplete && n == 1 && kappa_hat != 1.0) {
    bad("a 1x1 dictionary has condition number 1");
  }
  if (value_dist == ValueDist::kRademacher &&
      std::fabs(sigma - gamma) > 1e-12 * gamma) {
    bad("rademacher values require sigma == gamma");
  }
  if (value_dist == ValueDist::kSignHalfNormal && !(sigma >= gamma)) {
    bad("sign_halfnormal values require sigma >= gamma");
  }
}

double halfnormal_scale(double sigma, double gamma) {
  // s^2 + 2 gamma sqrt(2/pi) s + gamma^2 - sigma^2 = 0, positive root.
  const double c = gamma * std::sqrt(2.0 / std::numbers::pi);
  return -c + std::sqrt(c * c - gamma * gamma + sigma * sigma);
}

Matrix sample_orthogonal_dictionary(std::size_t n, std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "dictionary size must be > 0");
  Rng rng = Rng::derive(seed, "orthogonal-dictionary");
  return haar_from(rng, n);
}

Matrix sample_complete_dictionary(std::size_t n, double kappa_hat,
                                  std::uint64_t seed) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "dictionary size must be > 0");
  if (!(kappa_hat >= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "kappa_hat must be >= 1");
  }
  if (n == 1 && kappa_hat != 1.0) {
    fail(ErrorKind::kInvalidArgument, "a 1x1 dictionary has condition 1");
  }
  Rng rng = Rng::derive(seed, "complete-dictionary");
  const Matrix u = haar_from(rng, n);
  const Matrix v = haar_from(rng, n);
  Vector s(n, 1.0);
  const double log_k = std::log(kappa_hat);
  for (std::size_t i = 1; i < n; ++i) {
    s[i] = std::exp(-log_k * static_cast<double>(i) /
                    static_cast<double>(n - 1));
  }
  if (n > 1) s[n - 1] = 1.0 / kappa_hat;
  Matrix us = u;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) us(i, j) *= s[j];
  }
  return linalg::matmul_nt(us, v);
}

Matrix sample_code(const GenerativeParams& params) {
  params.validate();
  Rng rng = Rng::derive(params.seed, "code");
  const double excess_scale =
      params.value_dist == ValueDist::kSignHalfNormal
          ? halfnormal_scale(params.sigma, params.gamma)
          : 0.0;
  Matrix x(params.n, params.p);
  for (double& v : x.data()) {
    if (!rng.bernoulli(params.theta)) continue;
    const double sign = rng.rademacher();
    if (params.value_dist == ValueDist::kRademacher) {
      v = sign * params.gamma;
    } else {
      v = sign * (params.gamma + excess_scale * std::fabs(rng.normal()));
    }
  }
  return x;
}

GroundTruth sample_ground_truth(const GenerativeParams& params) {
  params.validate();
  GroundTruth gt;
  gt.dictionary = params.dict_kind == DictKind::kOrthogonal
                      ? sample_orthogonal_dictionary(params.n, params.seed)
                      : sample_complete_dictionary(params.n, params.kappa_hat,
                                                   params.seed);
  gt.code = sample_code(params);
  gt.signals = linalg::matmul(gt.dictionary, gt.code);
  for (std::size_t i = 0; i < gt.code.rows(); ++i) {
    for (std::size_t j = 0; j < gt.code.cols(); ++j) {
      if (gt.code(i, j) != 0.0) gt.support.emplace_back(i, j);
    }
  }
  return gt;
}

Matrix perturb_dictionary(const Matrix& d_star, double delta, PerturbKind kind,
                          std::uint64_t seed) {
  if (!(delta >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "perturb_dictionary: delta must be >= 0");
  }
  if (delta == 0.0) return d_star;

  constexpr int kMaxAttempts = 5;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = Rng::derive(seed, "perturb", static_cast<std::uint64_t>(attempt));
    Matrix e = gaussian_matrix(d_star.rows(), d_star.cols(), rng);
    e *= 1.0 / e.frobenius_norm();

    if (kind == PerturbKind::kGeneral) {
      Matrix out = d_star;
      out += delta * e;
      return out;
    }

    try {
      auto distance_at = [&](double scale, Matrix* out) {
        Matrix q = linalg::polar(d_star + scale * e);
        const double d = frobenius_distance(q, d_star);
        if (out != nullptr) *out = std::move(q);
        return d;
      };
      // Bracket the target distance, then bisect on the scale of E.
      double lo = 0.0;
      double hi = delta;
      int grow = 0;
      while (distance_at(hi, nullptr) < delta) {
        lo = hi;
        hi *= 2.0;
        if (++grow > 60) {
          fail(ErrorKind::kInvalidArgument,
               "perturb_dictionary: target distance is unreachable");
        }
      }
      Matrix best;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double d = distance_at(mid, &best);
        if (std::fabs(d - delta) <= 0.01 * delta) return best;
        (d < delta ? lo : hi) = mid;
      }
      distance_at(hi, &best);
      return best;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::kRankDeficient) throw;
      if (attempt + 1 == kMaxAttempts) {
        rethrow_with_context(err, "perturb_dictionary after 5 attempts");
      }
    }
  }
  fail(ErrorKind::kRankDeficient, "perturb_dictionary: no attempts left");
}

}  // namespace dictlearn
