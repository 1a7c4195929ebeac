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

#include "dictlearn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dictlearn/cdl.hpp"
#include "dictlearn/error.hpp"
#include "dictlearn/gen_model.hpp"
#include "dictlearn/image.hpp"
#include "dictlearn/linalg.hpp"
#include "dictlearn/online.hpp"
#include "dictlearn/rng.hpp"
#include "dictlearn/sparse_coding.hpp"

namespace dictlearn::experiments {
namespace {

GenerativeParams orthogonal_params(std::size_t n, std::size_t p, double theta,
                                   std::uint64_t seed) {
  GenerativeParams g;
  g.n = n;
  g.p = p;
  g.theta = theta;
  g.sigma = 1.0;
  g.gamma = 1.0;
  g.seed = seed;
  return g;
}

GenerativeParams complete_params(std::size_t n, std::size_t p, double theta,
                                 double kappa_hat, std::uint64_t seed) {
  GenerativeParams g = orthogonal_params(n, p, theta, seed);
  g.dict_kind = DictKind::kComplete;
  g.kappa_hat = kappa_hat;
  return g;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

Matrix leading_columns(const Matrix& m, std::size_t count) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return m.select_columns(idx);
}

double relative_error(const Matrix& a, const Matrix& ref) {
  const double denom = ref.frobenius_norm();
  return frobenius_distance(a, ref) / (denom > 0.0 ? denom : 1.0);
}

}  // namespace

FixedPointResult fixed_point(std::size_t n, std::size_t p, double theta,
                             std::uint64_t seed) {
  const GroundTruth truth =
      sample_ground_truth(orthogonal_params(n, p, theta, seed));
  const OdlStep step = odl_step(truth.signals, truth.dictionary, 0.5);
  return {frobenius_distance(step.x, truth.code),
          frobenius_distance(step.d_next, truth.dictionary)};
}

ContractionResult contraction_trial(std::size_t n, double theta,
                                    double init_distance, double err_floor,
                                    std::uint64_t seed) {
  const auto p = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) / (theta * theta)));
  const GroundTruth truth =
      sample_ground_truth(orthogonal_params(n, p, theta, seed));
  const Matrix d0 = perturb_dictionary(truth.dictionary, init_distance,
                                       PerturbKind::kOrthogonal, seed);
  OdlOptions opts;
  opts.zeta = 0.5;
  opts.max_iters = 50;
  const OdlResult res = run_odl(truth.signals, d0, opts, &truth);

  ContractionResult out;
  out.iterations = res.iterations;
  for (std::size_t t = 0; t < res.traces.size(); ++t) {
    const double err = res.traces[t].dict_err_fro.value_or(0.0);
    if (err < err_floor) out.reached_floor = true;
    if (t == 0) continue;
    const double prev = res.traces[t - 1].dict_err_fro.value_or(0.0);
    if (prev >= err_floor && prev > 0.0) {
      out.max_ratio = std::max(out.max_ratio, err / prev);
    }
  }
  out.final_err = res.traces.empty()
                      ? 0.0
                      : res.traces.back().dict_err_fro.value_or(0.0);
  return out;
}

bool support_recovery_trial(std::size_t n, double theta, double init_distance,
                            std::uint64_t seed) {
  const auto p = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) / (theta * theta)));
  const GroundTruth truth =
      sample_ground_truth(orthogonal_params(n, p, theta, seed));
  const Matrix d0 = perturb_dictionary(truth.dictionary, init_distance,
                                       PerturbKind::kOrthogonal, seed);
  const Matrix x =
      linalg::hard_threshold(linalg::matmul_tn(d0, truth.signals), 0.5);
  return support_mismatch(x, truth.code) == 0;
}

WarmupTrialResult warmup_trial(std::uint64_t seed, const WarmupOptions& warm,
                      std::size_t main_iters, double code_tol) {
  const GroundTruth truth =
      sample_ground_truth(orthogonal_params(5, 100, 0.3, seed));
  OdlOptions opts;
  opts.zeta = 0.5;
  opts.max_iters = main_iters;
  opts.stop_tol = 0.0;
  opts.warmup = warm;

  WarmupTrialResult out;
  out.support_size = truth.support.size();
  OdlResult res;
  try {
    res = run_odl(truth.signals, Matrix::identity(5), opts, &truth);
  } catch (const Error&) {
    return out;
  }
  out.warmup_iterations = res.warmup_iterations;
  if (!res.traces.empty()) {
    out.initial_mismatch = res.traces.front().support_mismatch.value_or(0);
  }
  for (std::size_t i = res.warmup_iterations; i < res.traces.size(); ++i) {
    const TraceRecord& rec = res.traces[i];
    const std::size_t main_iter = i - res.warmup_iterations;
    if (!out.mismatch_zero_at && rec.support_mismatch.value_or(1) == 0) {
      out.mismatch_zero_at = main_iter;
    }
    if (!out.code_converged_at &&
        rec.code_err_fro.value_or(INFINITY) < code_tol) {
      out.code_converged_at = main_iter;
    }
  }
  return out;
}

SpectralResult spectral_trial(std::size_t n, double theta, std::size_t p,
                              std::uint64_t seed) {
  const Matrix x = sample_code(orthogonal_params(n, p, theta, seed));
  const Vector s = linalg::singular_values(x);
  const double scale = std::sqrt(static_cast<double>(p) * theta);
  return {s.front() / scale, s.back() / scale};
}

double precond_identity_defect(std::size_t n, double kappa_hat,
                               std::uint64_t seed) {
  const Matrix a = sample_complete_dictionary(n, kappa_hat, seed);
  return linalg::orthogonality_defect(whitened_truth(a));
}

OracleResult online_oracle_trial(std::size_t n, std::size_t steps,
                                 std::size_t every, std::uint64_t seed) {
  const std::size_t p1 = 4 * n;
  const double theta = 0.3;
  const GroundTruth truth =
      sample_ground_truth(complete_params(n, p1 + steps, theta, 2.0, seed));
  const Matrix& y = truth.signals;
  PreconditionerState state = init_state(leading_columns(y, p1), theta);

  OracleResult out;
  for (std::size_t s = 0; s < steps; ++s) {
    update_preconditioner_in_place(state, y.column(p1 + s));
    if ((s + 1) % every != 0) continue;
    const std::size_t count = p1 + s + 1;
    const Matrix z_ref =
        linalg::spd_inverse(linalg::gram(leading_columns(y, count)));
    Matrix scaled = z_ref;
    scaled *= static_cast<double>(count) * theta;
    const Matrix l_ref = linalg::cholesky(scaled).matrix();
    out.max_l_err =
        std::max(out.max_l_err, relative_error(state.l_factor.matrix(), l_ref));
    out.max_z_err = std::max(out.max_z_err, relative_error(state.z_inv, z_ref));
    ++out.checks;
  }
  return out;
}

double cdl_floor_trial(const CdlFloorSetup& setup, std::size_t p,
                       std::uint64_t seed) {
  const GroundTruth truth = sample_ground_truth(
      complete_params(setup.n, p, setup.theta, setup.kappa_hat, seed));
  const Matrix a0 = perturb_dictionary(truth.dictionary, setup.init_distance,
                                       PerturbKind::kGeneral, seed);
  CdlOptions opts;
  opts.zeta = 0.5;
  opts.batch_size = setup.batch_size;
  opts.max_iters = setup.iters;
  opts.scale = static_cast<double>(p) * setup.theta;
  opts.sampling_seed = seed;
  opts.stop_tol = 0.0;
  const CdlResult res = run_cdl(truth.signals, a0, opts);
  return aligned_distance(res.dictionary, truth.dictionary).distance;
}

OnlineFloorResult online_floor_trial(const OnlineFloorSetup& setup,
                                     std::uint64_t seed) {
  const std::size_t p = setup.p1 + setup.p2 + setup.arrivals;
  const GroundTruth truth = sample_ground_truth(
      complete_params(setup.n, p, setup.theta, setup.kappa_hat, seed));
  const Matrix a0 = perturb_dictionary(truth.dictionary, setup.init_distance,
                                       PerturbKind::kGeneral, seed);
  OnlineOptions opts;
  opts.zeta = 0.5;
  opts.p1 = setup.p1;
  opts.p2 = setup.p2;
  opts.max_iters = setup.arrivals;
  opts.theta_sigma2 = setup.theta;
  MatrixColumnStream stream(truth.signals);
  const OnlineResult res = run_online(stream, a0, opts, &truth);

  std::vector<double> early;
  std::vector<double> late;
  for (const TraceRecord& rec : res.traces) {
    const double err = rec.dict_err_aligned.value_or(0.0);
    if (rec.iter < setup.early_end) early.push_back(err);
    if (rec.iter >= setup.late_begin) late.push_back(err);
  }
  return {mean(early), mean(late)};
}

OmpOracleResult omp_oracle_trial(std::size_t n, std::size_t k,
                                 std::uint64_t seed) {
  const Matrix d = sample_orthogonal_dictionary(n, seed);
  Rng rng = Rng::derive(seed, "omp-oracle");
  Vector y(n);
  for (double& v : y) v = rng.normal();

  const SparseCode code = omp(d, y, k, 0.0);

  const Vector corr = linalg::matvec_t(d, y);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return std::abs(corr[a]) > std::abs(corr[b]);
  });
  std::vector<std::size_t> top(order.begin(),
                               order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(top.begin(), top.end());

  OmpOracleResult out;
  out.matches = code.indices == top;
  if (out.matches) {
    for (std::size_t i = 0; i < k; ++i) {
      out.coeff_err =
          std::max(out.coeff_err, std::abs(code.values[i] - corr[top[i]]));
    }
  }
  Vector r = y;
  const Vector fit = synthesize(d, code);
  for (std::size_t i = 0; i < n; ++i) r[i] -= fit[i];
  for (std::size_t idx : code.indices) {
    out.residual_orth =
        std::max(out.residual_orth, std::abs(linalg::dot(d.column(idx), r)));
  }
  return out;
}

double dct_full_basis_psnr(std::size_t height, std::size_t width,
                           std::size_t patch, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, "dct-image");
  GrayImage img(height, width);
  for (double& v : img.pixels) v = rng.uniform();
  ReconstructOptions opts;
  opts.patch_h = patch;
  opts.patch_w = patch;
  opts.atoms = patch * patch;
  const GrayImage rec =
      reconstruct(img, dct_dictionary(patch, patch), opts, nullptr);
  return psnr(rec, img);
}

InpaintResult inpaint_trial(std::size_t k, double missing_fraction,
                            std::uint64_t seed) {
  constexpr std::size_t kSide = 50;
  constexpr std::size_t kPatch = 10;
  constexpr std::size_t kAtoms = kPatch * kPatch;
  const Matrix dict = dct_dictionary(kPatch, kPatch);
  Rng rng = Rng::derive(seed, "inpaint-image");

  PatchGrid grid;
  grid.patch_h = kPatch;
  grid.patch_w = kPatch;
  grid.grid_rows = kSide / kPatch;
  grid.grid_cols = kSide / kPatch;
  grid.patches = Matrix(kAtoms, grid.grid_rows * grid.grid_cols);
  for (std::size_t col = 0; col < grid.patches.cols(); ++col) {
    // DC at mid-grey plus four AC atoms; |AC entries| <= 0.2, so pixels stay
    // inside [0.02, 0.98].
    Vector c(kAtoms, 0.0);
    c[0] = 5.0;
    for (std::size_t a : rng.sample_without_replacement(kAtoms - 1, 4)) {
      c[a + 1] = rng.rademacher() * (0.2 + 0.4 * rng.uniform());
    }
    grid.patches.set_column(col, linalg::matvec(dict, c));
  }
  const GrayImage clean = assemble_patches(grid);
  const Corruption cor = corrupt(clean, missing_fraction, seed);
  ReconstructOptions opts;
  opts.atoms = k;
  const GrayImage rec = reconstruct(cor.image, dict, opts, &cor.observed);
  const GrayImage filled = reconstruct(cor.image, dict, opts);
  return {psnr(rec, clean), psnr(cor.image, clean), psnr(filled, clean)};
}

}  // namespace dictlearn::experiments
