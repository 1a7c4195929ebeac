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

// Seeded single-trial experiments behind the verify command and the
// acceptance suite. Each returns raw measurements; callers own thresholds.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "dictlearn/odl.hpp"

namespace dictlearn::experiments {

struct FixedPointResult {
  double code_err = 0.0;  // ||X^(0) - X*||_F
  double dict_err = 0.0;  // ||D^(1) - D*||_F
};
// D^(0) = D*, rademacher codes, zeta = gamma / 2.
FixedPointResult fixed_point(std::size_t n, std::size_t p, double theta,
                             std::uint64_t seed);

struct ContractionResult {
  // Largest dict_err_fro(t) / dict_err_fro(t-1) over steps whose previous
  // error was still >= err_floor.
  double max_ratio = 0.0;
  bool reached_floor = false;
  std::size_t iterations = 0;
  double final_err = 0.0;
};
// p = ceil(n / theta^2), gamma = sigma = 1, zeta = 0.5, orthogonal
// perturbation of D* at the given distance.
ContractionResult contraction_trial(std::size_t n, double theta,
                                    double init_distance, double err_floor,
                                    std::uint64_t seed);

// supp(HT_{1/2}(D0^T Y)) == supp(X*) in the same regime.
bool support_recovery_trial(std::size_t n, double theta, double init_distance,
                            std::uint64_t seed);

struct WarmupTrialResult {
  std::size_t support_size = 0;
  std::size_t initial_mismatch = 0;
  std::size_t warmup_iterations = 0;
  // Main-phase iteration (0-based) at which the condition first held.
  std::optional<std::size_t> mismatch_zero_at;
  std::optional<std::size_t> code_converged_at;  // code_err_fro < code_tol
};
// n = 5, p = 100, theta = 0.3, warm-up from the identity then main_iters
// iterations of the main loop at zeta = 0.5.
WarmupTrialResult warmup_trial(std::uint64_t seed, const WarmupOptions& warm,
                      std::size_t main_iters, double code_tol);

struct SpectralResult {
  double upper = 0.0;  // sigma_max(X) / (sqrt(p theta) sigma)
  double lower = 0.0;  // sigma_min(X) / (sqrt(p theta) sigma)
};
SpectralResult spectral_trial(std::size_t n, double theta, std::size_t p,
                              std::uint64_t seed);

// ||D*^T D* - I||_F for D* = L((A A^T)^{-1})^T A, A a random complete
// dictionary.
double precond_identity_defect(std::size_t n, double kappa_hat,
                               std::uint64_t seed);

struct OracleResult {
  double max_l_err = 0.0;  // relative Frobenius
  double max_z_err = 0.0;
  std::size_t checks = 0;
};
// `steps` sequential rank-one updates; every `every` steps the incremental
// state is compared against one rebuilt from the full Gram.
OracleResult online_oracle_trial(std::size_t n, std::size_t steps,
                                 std::size_t every, std::uint64_t seed);

struct CdlFloorSetup {
  std::size_t n = 20;
  double theta = 0.1;
  double kappa_hat = 2.0;
  std::size_t batch_size = 2000;
  std::size_t iters = 60;
  double init_distance = 0.05;
};
// Final aligned dictionary error of the mini-batch solver with p samples.
double cdl_floor_trial(const CdlFloorSetup& setup, std::size_t p,
                       std::uint64_t seed);

struct OnlineFloorSetup {
  std::size_t n = 15;
  double theta = 0.1;
  double kappa_hat = 1.5;
  std::size_t p1 = 2000;
  std::size_t p2 = 1500;
  std::size_t arrivals = 6000;
  double init_distance = 0.05;
  std::size_t early_end = 1000;    // mean over [0, early_end)
  std::size_t late_begin = 5000;   // mean over [late_begin, arrivals)
};
struct OnlineFloorResult {
  double early_mean = 0.0;
  double late_mean = 0.0;
};
OnlineFloorResult online_floor_trial(const OnlineFloorSetup& setup,
                                     std::uint64_t seed);

struct OmpOracleResult {
  bool matches = false;        // support and coefficients agree
  double coeff_err = 0.0;      // max |omp - oracle| on the oracle support
  double residual_orth = 0.0;  // max |d_i^T r| over selected atoms
};
// Orthogonal dictionary: k-atom OMP against the top-k entries of D^T y.
OmpOracleResult omp_oracle_trial(std::size_t n, std::size_t k,
                                 std::uint64_t seed);

// PSNR of a full-basis DCT reconstruction of a random clean image.
double dct_full_basis_psnr(std::size_t height, std::size_t width,
                           std::size_t patch, std::uint64_t seed);

struct InpaintResult {
  double psnr_reconstructed = 0.0;
  double psnr_corrupted = 0.0;
  double psnr_zero_fill = 0.0;  // coding the corrupted patches unmasked
};
// 50x50 image of 10x10 patches, each a 5-atom DCT combination; half the
// pixels dropped; masked OMP with k atoms.
InpaintResult inpaint_trial(std::size_t k, double missing_fraction,
                            std::uint64_t seed);

}  // namespace dictlearn::experiments
