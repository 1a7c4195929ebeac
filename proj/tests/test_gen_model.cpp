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

#include <cmath>
#include <set>

#include "dictlearn/error.hpp"
#include "dictlearn/gen_model.hpp"
#include "dictlearn/linalg.hpp"
#include "dictlearn/rng.hpp"
#include "test_support.hpp"

namespace dictlearn {
namespace {

using testing::to_eigen;

GenerativeParams params(std::size_t n, std::size_t p, double theta,
                        std::uint64_t seed) {
  GenerativeParams g;
  g.n = n;
  g.p = p;
  g.theta = theta;
  g.seed = seed;
  return g;
}

Eigen::VectorXd svd_values(const Matrix& m) {
  return Eigen::JacobiSVD<Eigen::MatrixXd>(to_eigen(m)).singularValues();
}

TEST(Rng, DerivedStreamsAreReproducibleAndDistinct) {
  Rng a = Rng::derive(5, "alpha");
  Rng b = Rng::derive(5, "alpha");
  Rng c = Rng::derive(5, "beta");
  Rng d = Rng::derive(5, "alpha", 1);
  bool any_diff_c = false, any_diff_d = false;
  for (int i = 0; i < 16; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    any_diff_c |= va != c.next_u64();
    any_diff_d |= va != d.next_u64();
  }
  EXPECT_TRUE(any_diff_c);
  EXPECT_TRUE(any_diff_d);
}

TEST(Rng, UniformAndBelowRanges) {
  Rng r(3);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u / 20000;
    ASSERT_LT(r.below(7), 7u);
  }
  EXPECT_NEAR(mean, 0.5, 4 * std::sqrt(1.0 / 12 / 20000));
}

TEST(Rng, NormalMoments) {
  Rng r(4);
  const int count = 50000;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double z = r.normal();
    m1 += z / count;
    m2 += z * z / count;
  }
  EXPECT_NEAR(m1, 0.0, 4 / std::sqrt(count));
  EXPECT_NEAR(m2, 1.0, 4 * std::sqrt(2.0 / count));
}

TEST(Rng, SampleWithoutReplacement) {
  Rng r(5);
  const auto s = r.sample_without_replacement(100, 37);
  ASSERT_EQ(s.size(), 37u);
  EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
  EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 37u);
  EXPECT_LT(s.back(), 100u);
  const auto all = r.sample_without_replacement(10, 10);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(all[i], i);
  EXPECT_THROW(r.sample_without_replacement(3, 4), Error);
}

TEST(GenerativeParams, Validation) {
  GenerativeParams g = params(5, 10, 0.3, 0);
  EXPECT_NO_THROW(g.validate());
  g.theta = 0.0;
  EXPECT_THROW(g.validate(), Error);
  g = params(5, 10, 0.3, 0);
  g.kappa_hat = 2.0;
  EXPECT_THROW(g.validate(), Error);
  g = params(5, 10, 0.3, 0);
  g.sigma = 2.0;
  EXPECT_THROW(g.validate(), Error);
  g.value_dist = ValueDist::kSignHalfNormal;
  EXPECT_NO_THROW(g.validate());
  g.sigma = 0.5;
  EXPECT_THROW(g.validate(), Error);
}

TEST(OrthogonalDictionary, Examples) {
  const Matrix d1 = sample_orthogonal_dictionary(1, 3);
  EXPECT_EQ(std::abs(d1(0, 0)), 1.0);
  for (std::size_t n : {2u, 5u, 20u}) {
    const Matrix d = sample_orthogonal_dictionary(n, 11);
    EXPECT_LE(linalg::orthogonality_defect(d), 1e-12);
    EXPECT_LE(frobenius_distance(linalg::polar(d), d), 1e-10);
  }
  EXPECT_GT(frobenius_distance(sample_orthogonal_dictionary(8, 1),
                               sample_orthogonal_dictionary(8, 2)),
            0.1);
}

TEST(OrthogonalDictionary, HaarFirstEntryMoments) {
  // For Haar Q in O(n), E Q_11 = 0 and E Q_11^2 = 1/n.
  const std::size_t n = 4;
  const int count = 4000;
  double m1 = 0.0, m2 = 0.0;
  for (int s = 0; s < count; ++s) {
    const double q = sample_orthogonal_dictionary(n, s)(0, 0);
    m1 += q / count;
    m2 += q * q / count;
  }
  EXPECT_NEAR(m1, 0.0, 4 * std::sqrt(0.25 / count));
  EXPECT_NEAR(m2, 0.25, 0.03);
}

TEST(CompleteDictionary, Examples) {
  const Eigen::VectorXd s1 = svd_values(sample_complete_dictionary(6, 1.0, 3));
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(s1(i), 1.0, 1e-12);
  const Eigen::VectorXd s2 = svd_values(sample_complete_dictionary(2, 4.0, 3));
  EXPECT_NEAR(s2(0), 1.0, 1e-12);
  EXPECT_NEAR(s2(1), 0.25, 1e-12);
  const Eigen::VectorXd s3 = svd_values(sample_complete_dictionary(16, 3.0, 9));
  EXPECT_NEAR(s3(0), 1.0, 1e-8);
  EXPECT_NEAR(s3(0) / s3(15), 3.0, 1e-8);
}

TEST(SampleCode, FullDensityIsAllPlusMinusGamma) {
  GenerativeParams g = params(6, 30, 1.0, 2);
  g.gamma = g.sigma = 1.5;
  const Matrix x = sample_code(g);
  for (double v : x.data()) EXPECT_EQ(std::abs(v), 1.5);
}

TEST(SampleCode, NonzeroCountConcentrates) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix x = sample_code(params(50, 2000, 0.1, seed));
    const double nnz = static_cast<double>(x.count_nonzero());
    EXPECT_LE(std::abs(nnz - 10000.0), 4 * std::sqrt(9000.0)) << seed;
  }
}

TEST(SampleCode, RademacherMeanNearZero) {
  const Matrix x = sample_code(params(40, 3000, 0.2, 8));
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : x.data()) {
    if (v != 0.0) {
      sum += v;
      ++count;
    }
  }
  EXPECT_LE(std::abs(sum / count), 4.0 / std::sqrt(count));
}

TEST(SampleCode, HalfNormalFloorAndSecondMoment) {
  GenerativeParams g = params(30, 4000, 0.3, 6);
  g.value_dist = ValueDist::kSignHalfNormal;
  g.gamma = 1.0;
  g.sigma = 1.5;
  const Matrix x = sample_code(g);
  double m1 = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (double v : x.data()) {
    if (v == 0.0) continue;
    EXPECT_GE(std::abs(v), 1.0);
    m1 += v;
    m2 += v * v;
    ++count;
  }
  m1 /= count;
  m2 /= count;
  EXPECT_LE(std::abs(m1), 4 * 1.5 / std::sqrt(count));
  EXPECT_NEAR(m2, 2.25, 0.05);
}

TEST(HalfNormalScale, SecondMomentIdentity) {
  // E (G + s|Z|)^2 = G^2 + 2 G s sqrt(2/pi) + s^2 must equal sigma^2.
  for (auto [sigma, gamma] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {3.0, 0.5}}) {
    const double s = halfnormal_scale(sigma, gamma);
    EXPECT_GE(s, 0.0);
    EXPECT_NEAR(gamma * gamma + 2 * gamma * s * std::sqrt(2 / M_PI) + s * s,
                sigma * sigma, 1e-12);
  }
}

TEST(SampleCode, ColumnCovarianceIsIsotropic) {
  const std::size_t n = 20, p = 100000;
  const double theta = 0.1;
  const Matrix x = sample_code(params(n, p, theta, 3));
  const Eigen::MatrixXd cov =
      to_eigen(x) * to_eigen(x).transpose() / static_cast<double>(p);
  const double bound = 5 * std::sqrt(theta / p) * std::sqrt(std::log(n));
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(cov(i, i), theta, 5 * std::sqrt(theta / p));
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) EXPECT_LE(std::abs(cov(i, j)), bound);
    }
  }
}

TEST(GroundTruth, InvariantsHold) {
  for (DictKind kind : {DictKind::kOrthogonal, DictKind::kComplete}) {
    GenerativeParams g = params(12, 300, 0.25, 21);
    g.dict_kind = kind;
    if (kind == DictKind::kComplete) g.kappa_hat = 3.0;
    const GroundTruth t = sample_ground_truth(g);
    const Eigen::MatrixXd prod = to_eigen(t.dictionary) * to_eigen(t.code);
    EXPECT_LE((prod - to_eigen(t.signals)).norm(), 1e-12);
    std::set<std::pair<std::size_t, std::size_t>> supp(t.support.begin(),
                                                       t.support.end());
    EXPECT_EQ(supp.size(), t.support.size());
    EXPECT_TRUE(std::is_sorted(t.support.begin(), t.support.end()));
    for (std::size_t i = 0; i < g.n; ++i) {
      for (std::size_t j = 0; j < g.p; ++j) {
        if (supp.count({i, j}) != 0) {
          EXPECT_GE(std::abs(t.code(i, j)), g.gamma);
        } else {
          EXPECT_EQ(t.code(i, j), 0.0);
        }
      }
    }
    const Eigen::VectorXd s = svd_values(t.dictionary);
    if (kind == DictKind::kOrthogonal) {
      EXPECT_LE(linalg::orthogonality_defect(t.dictionary), 1e-10);
    } else {
      EXPECT_NEAR(s(0), 1.0, 1e-8);
      EXPECT_NEAR(s(0) / s(11), 3.0, 1e-8);
    }
  }
}

TEST(GroundTruth, DeterministicBitwise) {
  GenerativeParams g = params(7, 50, 0.3, 77);
  g.value_dist = ValueDist::kSignHalfNormal;
  g.sigma = 1.3;
  const GroundTruth a = sample_ground_truth(g);
  const GroundTruth b = sample_ground_truth(g);
  EXPECT_EQ(a.dictionary, b.dictionary);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.signals, b.signals);
  EXPECT_EQ(a.support, b.support);
}

TEST(Perturb, Examples) {
  const Matrix d = sample_orthogonal_dictionary(20, 4);
  EXPECT_EQ(perturb_dictionary(d, 0.0, PerturbKind::kOrthogonal, 1), d);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix q = perturb_dictionary(d, 0.1, PerturbKind::kOrthogonal, s);
    EXPECT_LE(linalg::orthogonality_defect(q), 1e-10);
    const double dist = frobenius_distance(q, d);
    EXPECT_GE(dist, 0.09);
    EXPECT_LE(dist, 0.11);
    const Matrix g = perturb_dictionary(d, 0.1, PerturbKind::kGeneral, s);
    EXPECT_NEAR(frobenius_distance(g, d), 0.1, 1e-14);
  }
  EXPECT_THROW(perturb_dictionary(d, -1.0, PerturbKind::kGeneral, 0), Error);
}

}  // namespace
}  // namespace dictlearn
