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
#include <utility>
#include <vector>

#include "dictlearn/matrix.hpp"

namespace dictlearn {

enum class DictKind { kOrthogonal, kComplete };
enum class ValueDist { kRademacher, kSignHalfNormal };
enum class PerturbKind { kOrthogonal, kGeneral };

// Parameters of the Bernoulli-sub-Gaussian generative model Y = D* X*.
struct GenerativeParams {
  std::size_t n = 0;
  std::size_t p = 0;
  double theta = 0.0;   // Bernoulli rate of the support
  double sigma = 1.0;   // sqrt(E X^2) of a nonzero
  double gamma = 1.0;   // lower bound on |nonzero|
  double kappa_hat = 1.0;
  DictKind dict_kind = DictKind::kOrthogonal;
  ValueDist value_dist = ValueDist::kRademacher;
  std::uint64_t seed = 0;

  // Throws InvalidArgument when the bundle is inconsistent.
  void validate() const;
};

struct GroundTruth {
  Matrix dictionary;  // n x n, D* or A*
  Matrix code;        // n x p
  Matrix signals;     // n x p, dictionary * code
  // Nonzero positions of `code` in row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> support;
};

// Haar-distributed orthogonal matrix (sign-corrected QR of a Gaussian).
Matrix sample_orthogonal_dictionary(std::size_t n, std::uint64_t seed);

// U diag(s) V^T with Haar U, V and s log-spaced from 1 down to 1/kappa_hat.
Matrix sample_complete_dictionary(std::size_t n, double kappa_hat,
                                  std::uint64_t seed);

Matrix sample_code(const GenerativeParams& params);

GroundTruth sample_ground_truth(const GenerativeParams& params);

// Initial dictionary near `d_star`. kOrthogonal returns polar(d_star + E)
// with the achieved distance within 10% of `delta`; kGeneral returns
// d_star + E with ||E||_F = delta.
Matrix perturb_dictionary(const Matrix& d_star, double delta, PerturbKind kind,
                          std::uint64_t seed);

// Scale of the half-normal excess for kSignHalfNormal nonzeros so that
// E (gamma + s|Z|)^2 = sigma^2.
double halfnormal_scale(double sigma, double gamma);

}  // namespace dictlearn
