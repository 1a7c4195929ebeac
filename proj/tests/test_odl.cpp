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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dictlearn/error.hpp"
#include "dictlearn/gen_model.hpp"
#include "dictlearn/linalg.hpp"
#include "dictlearn/odl.hpp"
#include "test_support.hpp"

namespace dictlearn {
namespace {

using testing::TestRng;
using testing::to_eigen;

GroundTruth orthogonal_truth(std::size_t n, std::size_t p, double theta,
                             std::uint64_t seed) {
  GenerativeParams g;
  g.n = n;
  g.p = p;
  g.theta = theta;
  g.seed = seed;
  return sample_ground_truth(g);
}

// Minimum over all signed permutations, by enumeration.
double brute_force_aligned(const Matrix& d, const Matrix& d_star) {
  const std::size_t n = d.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = INFINITY;
  do {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      double sq = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double s = (mask >> j) & 1 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double diff = s * d(i, perm[j]) - d_star(i, j);
          sq += diff * diff;
        }
      }
      best = std::min(best, std::sqrt(sq));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(OdlStep, FixedPoint) {
  const GroundTruth t = orthogonal_truth(10, 400, 0.2, 1);
  const OdlStep s = odl_step(t.signals, t.dictionary, 0.5);
  EXPECT_EQ(s.x.count_nonzero(), t.code.count_nonzero());
  EXPECT_LE(frobenius_distance(s.x, t.code), 1e-10);
  EXPECT_LE(frobenius_distance(s.d_next, t.dictionary), 1e-10);
}

TEST(OdlStep, AllZeroCodeIsRankDeficient) {
  const GroundTruth t = orthogonal_truth(4, 30, 0.3, 2);
  try {
    odl_step(t.signals, t.dictionary, 10.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRankDeficient);
  }
}

TEST(OdlStep, HandSupportExample) {
  const Matrix x_star{{1.0, 0.0, 2.0}, {0.0, -1.0, 0.0}};
  const Matrix y = x_star;  // D* = I
  const Matrix d = linalg::polar(Matrix{{1.0, 0.05}, {-0.05, 1.0}});
  const OdlStep s = odl_step(y, d, 0.5);
  // Oracle: d^T y evaluated independently.
  const Eigen::MatrixXd dty = to_eigen(d).transpose() * to_eigen(y);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_EQ(s.x(i, j) != 0.0, x_star(i, j) != 0.0);
      EXPECT_EQ(std::abs(dty(i, j)) >= 0.5, x_star(i, j) != 0.0);
    }
  }
}

TEST(OdlStep, RequiresOrthogonalInput) {
  const GroundTruth t = orthogonal_truth(4, 30, 0.3, 2);
  Matrix d = t.dictionary;
  d(0, 0) += 1e-3;
  EXPECT_THROW(odl_step(t.signals, d, 0.5), Error);
}

TEST(OdlStep, ProcrustesDecreasesObjective) {
  TestRng rng(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GroundTruth t = orthogonal_truth(8, 200, 0.3, seed);
    const Matrix d =
        perturb_dictionary(t.dictionary, 0.3, PerturbKind::kOrthogonal, seed);
    const OdlStep s = odl_step(t.signals, d, 0.5);
    const Eigen::MatrixXd y = to_eigen(t.signals);
    const Eigen::MatrixXd x = to_eigen(s.x);
    const double before = (y - to_eigen(d) * x).norm();
    const double after = (y - to_eigen(s.d_next) * x).norm();
    EXPECT_LE(after, before + 1e-12);
    EXPECT_LE(linalg::orthogonality_defect(s.d_next), 1e-10);
  }
}

TEST(AlignedDistance, Examples) {
  const Matrix d = sample_orthogonal_dictionary(5, 9);
  EXPECT_EQ(aligned_distance(d, d).distance, 0.0);
  Matrix shuffled = d;
  for (std::size_t i = 0; i < 5; ++i) {
    shuffled(i, 0) = d(i, 1);
    shuffled(i, 1) = d(i, 0);
    shuffled(i, 2) = -d(i, 2);
  }
  const Alignment al = aligned_distance(shuffled, d);
  EXPECT_LE(al.distance, 1e-15);
  EXPECT_EQ(al.permutation[0], 1u);
  EXPECT_EQ(al.permutation[1], 0u);
  EXPECT_EQ(al.signs[2], -1.0);
}

TEST(AlignedDistance, MatchesBruteForceSmallN) {
  TestRng rng(4);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 25; ++trial) {
      const Matrix a = rng.orthogonal(n);
      const Matrix b = trial % 2 == 0 ? rng.orthogonal(n) : rng.gaussian(n, n);
      EXPECT_NEAR(aligned_distance(a, b).distance, brute_force_aligned(a, b),
                  1e-12)
          << "n=" << n << " trial=" << trial;
    }
  }
}

TEST(AlignedDistance, NeverExceedsDirectDistance) {
  TestRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = rng.gaussian(7, 7);
    const Matrix b = rng.gaussian(7, 7);
    EXPECT_LE(aligned_distance(a, b).distance,
              frobenius_distance(a, b) + 1e-12);
  }
}

TEST(AlignCode, InvertsSignedPermutation) {
  const GroundTruth t = orthogonal_truth(4, 20, 0.5, 6);
  Matrix d = t.dictionary;
  // d = D* with columns 0 and 3 swapped, column 1 negated.
  for (std::size_t i = 0; i < 4; ++i) {
    d(i, 0) = t.dictionary(i, 3);
    d(i, 3) = t.dictionary(i, 0);
    d(i, 1) = -t.dictionary(i, 1);
  }
  const Matrix x = linalg::hard_threshold(linalg::matmul_tn(d, t.signals), 0.5);
  const Alignment al = aligned_distance(d, t.dictionary);
  EXPECT_LE(frobenius_distance(align_code(x, al), t.code), 1e-12);
  EXPECT_EQ(support_mismatch(align_code(x, al), t.code), 0u);
}

TEST(SupportMismatch, CountsSymmetricDifference) {
  const Matrix a{{1.0, 0.0}, {0.0, 2.0}};
  const Matrix b{{0.0, 0.0}, {3.0, -1.0}};
  EXPECT_EQ(support_mismatch(a, b), 2u);
  EXPECT_EQ(support_mismatch(a, a), 0u);
}

TEST(RunOdl, StartAtTruthConvergesImmediately) {
  const GroundTruth t = orthogonal_truth(10, 300, 0.2, 7);
  OdlOptions opts;
  const OdlResult r = run_odl(t.signals, t.dictionary, opts, &t);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_LE(*r.traces.front().dict_err_fro, 1e-10);
  EXPECT_FALSE(r.traces.front().contraction.has_value());
}

TEST(RunOdl, SparseRegimeHalvesEachStep) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GroundTruth t = orthogonal_truth(20, 2000, 0.1, seed);
    const Matrix d0 =
        perturb_dictionary(t.dictionary, 0.1, PerturbKind::kOrthogonal, seed);
    OdlOptions opts;
    opts.max_iters = 30;
    const OdlResult r = run_odl(t.signals, d0, opts, &t);
    ASSERT_FALSE(r.traces.empty());
    for (std::size_t i = 1; i < r.traces.size(); ++i) {
      const double prev = *r.traces[i - 1].dict_err_fro;
      const double cur = *r.traces[i].dict_err_fro;
      if (prev < 1e-8) break;
      EXPECT_LE(cur, 0.5 * prev) << "seed " << seed << " iter " << i;
      EXPECT_NEAR(*r.traces[i].contraction, cur / prev, 1e-15);
    }
    EXPECT_LT(*r.traces.back().dict_err_fro, 1e-8);
  }
}

TEST(RunOdl, NormalizedCodeErrorHalves) {
  const GroundTruth t = orthogonal_truth(20, 2000, 0.1, 3);
  const Matrix d0 =
      perturb_dictionary(t.dictionary, 0.1, PerturbKind::kOrthogonal, 3);
  const OdlResult r = run_odl(t.signals, d0, OdlOptions{}, &t);
  for (std::size_t i = 1; i < r.traces.size(); ++i) {
    const double prev = *r.traces[i - 1].code_err_normalized;
    if (prev < 1e-8) break;
    EXPECT_LE(*r.traces[i].code_err_normalized, 0.5 * prev + 1e-12);
  }
}

TEST(RunOdl, IteratesStayOrthogonal) {
  const GroundTruth t = orthogonal_truth(12, 500, 0.2, 8);
  const Matrix d0 =
      perturb_dictionary(t.dictionary, 0.3, PerturbKind::kOrthogonal, 8);
  OdlOptions opts;
  opts.max_iters = 10;
  opts.stop_tol = 0.0;
  Matrix current = d0;
  std::size_t seen = 0;
  // Replaying from each trace is equivalent to checking every iterate.
  for (std::size_t k = 1; k <= opts.max_iters; ++k) {
    OdlOptions one = opts;
    one.max_iters = 1;
    const OdlResult r = run_odl(t.signals, current, one);
    EXPECT_LE(linalg::orthogonality_defect(r.dictionary), 1e-8);
    current = r.dictionary;
    ++seen;
  }
  const OdlResult full = run_odl(t.signals, d0, opts);
  EXPECT_EQ(full.dictionary, current);
  EXPECT_EQ(seen, opts.max_iters);
}

TEST(RunOdl, WithoutTruthOnlyStepAndTime) {
  const GroundTruth t = orthogonal_truth(6, 100, 0.3, 9);
  const OdlResult r = run_odl(t.signals, Matrix::identity(6),
                              OdlOptions{.zeta = 0.5, .max_iters = 5});
  for (const auto& rec : r.traces) {
    EXPECT_FALSE(rec.dict_err_fro.has_value());
    EXPECT_FALSE(rec.support_mismatch.has_value());
    EXPECT_FALSE(rec.contraction.has_value());
    EXPECT_TRUE(rec.step_distance.has_value());
  }
}

TEST(RunOdl, ErrorsCarryIteration) {
  const GroundTruth t = orthogonal_truth(4, 30, 0.3, 2);
  OdlOptions opts;
  opts.zeta = 100.0;
  try {
    run_odl(t.signals, t.dictionary, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRankDeficient);
    EXPECT_NE(std::string(e.what()).find("iteration 0"), std::string::npos);
  }
}

TEST(Warmup, LargeStartReturnsIdentity) {
  const GroundTruth t = orthogonal_truth(5, 100, 0.3, 1);
  OdlOptions opts;
  opts.warmup = WarmupOptions{.zeta0 = 2.0 * t.signals.max_abs(),
                              .beta = 0.9,
                              .max_iters = 1};
  const WarmupResult w = warmup(t.signals, opts);
  EXPECT_EQ(w.iterations, 1u);
  EXPECT_EQ(w.dictionary, Matrix::identity(5));
}

TEST(Warmup, GeometricScheduleAndHandoff) {
  const GroundTruth t = orthogonal_truth(5, 100, 0.3, 2);
  const double zeta0 = 2.0 * t.signals.max_abs();
  OdlOptions opts;
  opts.warmup = WarmupOptions{.zeta0 = zeta0, .beta = 0.9, .max_iters = 500};
  const WarmupResult w = warmup(t.signals, opts);
  ASSERT_FALSE(w.thresholds.empty());
  for (std::size_t i = 0; i < w.thresholds.size(); ++i) {
    EXPECT_EQ(w.thresholds[i], zeta0 * std::pow(0.9, static_cast<double>(i)));
    if (i > 0) EXPECT_LT(w.thresholds[i], w.thresholds[i - 1]);
    EXPECT_GT(w.thresholds[i], opts.zeta);
  }
  // Stopped because the next threshold would reach the main-phase value.
  EXPECT_LE(zeta0 * std::pow(0.9, static_cast<double>(w.thresholds.size())),
            opts.zeta);
}

TEST(Warmup, SmallRegimeConverges) {
  std::size_t converged = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GroundTruth t = orthogonal_truth(5, 100, 0.3, seed);
    OdlOptions opts;
    opts.max_iters = 50;
    opts.warmup = WarmupOptions{};
    const OdlResult r = run_odl(t.signals, Matrix::identity(5), opts, &t);
    EXPECT_EQ(*r.traces.front().support_mismatch, t.support.size());
    if (aligned_distance(r.dictionary, t.dictionary).distance < 1e-6) {
      ++converged;
    }
  }
  EXPECT_GE(converged, 8u);
}

TEST(RunOdl, SmallRegimeGoodInitKeepsSupport) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const GroundTruth t = orthogonal_truth(5, 100, 0.3, seed);
    const Matrix d0 =
        perturb_dictionary(t.dictionary, 0.2, PerturbKind::kOrthogonal, seed);
    OdlOptions opts;
    opts.max_iters = 50;
    const OdlResult r = run_odl(t.signals, d0, opts, &t);
    bool reached = false;
    for (const auto& rec : r.traces) {
      if (*rec.support_mismatch == 0) reached = true;
      if (reached) EXPECT_EQ(*rec.support_mismatch, 0u) << "seed " << seed;
    }
    EXPECT_TRUE(reached);
  }
}

TEST(OdlOptions, Validation) {
  OdlOptions o;
  o.zeta = 0.0;
  EXPECT_THROW(o.validate(), Error);
  o.zeta = 0.5;
  o.warmup = WarmupOptions{.beta = 1.0};
  EXPECT_THROW(o.validate(), Error);
}

}  // namespace
}  // namespace dictlearn
