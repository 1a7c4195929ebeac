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

namespace dictlearn::kernels {

// Data-parallel inner loops used by the dense linear algebra layer. Every
// entry has a scalar reference implementation; vectorized tables must agree
// with it (exactly for the elementwise kernels, to rounding for reductions).
//
// All pointers address contiguous doubles; `n` is the element count.
struct KernelTable {
  const char* name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // out[i] = |in[i]| >= zeta ? in[i] : 0. `in` and `out` may alias.
  void (*hard_threshold)(const double* in, double* out, std::size_t n,
                         double zeta);
  // sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // max_i |x[i]|, 0 for n == 0.
  double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();

// AVX2+FMA table, or nullptr when the build or the CPU lacks support.
const KernelTable* avx2_kernels();

// The table selected at first use: the widest table the CPU supports, unless
// the environment variable DICTLEARN_KERNELS=scalar forces the reference.
// Selection is fixed for the lifetime of the process.
const KernelTable& active();

}  // namespace dictlearn::kernels
