//
// Copyright 2026 The rpbandit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "oracles.hpp"
#include "rpbandit/robust.hpp"

namespace rpbandit {
namespace {

struct Sample {
  ActionSet query;
  std::vector<Vector> actions;
  std::vector<double> rewards;
};

// Random design: n draws from K unit-ish actions, Gaussian noise.
Sample CleanSample(int d, int k, int n, const Vector& theta, double sigma,
                   std::mt19937_64& gen) {
  const Matrix cols = testing::RandomUnitColumns(d, k, gen);
  Sample s{ActionSet(cols), {}, {}};
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::normal_distribution<double> noise(0.0, sigma);
  for (int i = 0; i < n; ++i) {
    const Vector a = cols.col(i < k ? i : pick(gen));
    s.actions.push_back(a);
    s.rewards.push_back(a.dot(theta) + noise(gen));
  }
  return s;
}

double MNorm(const Vector& v, const Matrix& gram) { return std::sqrt(v.dot(gram * v)); }

TEST(SpectralFilter, IdenticalPoints) {
  Matrix pts(3, 10);
  for (int j = 0; j < 10; ++j) pts.col(j) = Vector::Constant(3, 0.7);
  for (double lambda : {0.0, 1.0}) {
    Stream rng(1);
    const FilterResult r = SpectralFilter(pts, lambda, rng);
    EXPECT_EQ(r.diagnostics.removed_count, 0);
    EXPECT_LT((r.mean - Vector::Constant(3, 0.7)).norm(), 1e-15);
  }
}

TEST(SpectralFilter, CleanGaussianReturnsMeanExactly) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> normal;
  Matrix pts(3, 100);
  for (int j = 0; j < 100; ++j)
    for (int i = 0; i < 3; ++i) pts(i, j) = normal(gen);
  Stream rng(2);
  const FilterResult r = SpectralFilter(pts, 10.0, rng);
  EXPECT_EQ(r.diagnostics.removed_count, 0);
  const Vector expected = pts.rowwise().mean();
  EXPECT_EQ(r.mean, expected);
  EXPECT_LT(r.diagnostics.final_top_eigenvalue, 40.0);
}

TEST(SpectralFilter, RemovesOneDimensionalOutliers) {
  std::vector<double> errors;
  int all_removed = 0;
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 gen(1000 + seed);
    std::normal_distribution<double> normal;
    Matrix pts(1, 200);
    for (int j = 0; j < 180; ++j) pts(0, j) = normal(gen);
    for (int j = 180; j < 200; ++j) pts(0, j) = 100.0;
    Stream rng(static_cast<std::uint64_t>(seed));
    const FilterResult r = SpectralFilter(pts, 2.0, rng);
    errors.push_back(r.mean.norm());
    const auto& removed = r.diagnostics.removed;
    const int outliers = static_cast<int>(
        std::count_if(removed.begin(), removed.end(), [](int i) { return i >= 180; }));
    if (outliers == 20) ++all_removed;
    EXPECT_LT(r.diagnostics.final_top_eigenvalue, 8.0);
  }
  EXPECT_LE(testing::SampleQuantile(errors, 0.5), 1.0);
  EXPECT_GE(all_removed, 45);
}

TEST(SpectralFilter, TooManyRemoved) {
  // Two equal clusters far apart with lambda = 0: the filter cannot reach a
  // small covariance before exhausting its removal budget.
  Matrix pts(1, 10);
  for (int j = 0; j < 10; ++j) pts(0, j) = (j % 2 == 0) ? -1.0 : 1.0 + 0.01 * j;
  Stream rng(3);
  EXPECT_RPB_ERROR(SpectralFilter(pts, 0.0, rng), ErrorCode::kTooManyRemoved);
}

TEST(SpectralFilter, RemovalCountNeverExceedsCap) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + trial;
    Matrix pts(2, n);
    for (int j = 0; j < n; ++j) {
      pts(0, j) = normal(gen) * (j % 3 == 0 ? 30.0 : 1.0);
      pts(1, j) = normal(gen);
    }
    Stream rng(static_cast<std::uint64_t>(trial));
    try {
      const FilterResult r = SpectralFilter(pts, 0.3, rng);
      EXPECT_LE(r.diagnostics.removed_count, (n + 1) / 2);
      EXPECT_LT(r.diagnostics.final_top_eigenvalue, 1.2);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kTooManyRemoved);
    }
  }
}

TEST(SpectralFilter, Deterministic) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> normal;
  Matrix pts(2, 60);
  for (int j = 0; j < 60; ++j) {
    pts(0, j) = normal(gen) + (j < 6 ? 40.0 : 0.0);
    pts(1, j) = normal(gen);
  }
  Stream a(99);
  Stream b(99);
  const FilterResult ra = SpectralFilter(pts, 1.0, a);
  const FilterResult rb = SpectralFilter(pts, 1.0, b);
  EXPECT_EQ(ra.diagnostics.removed, rb.diagnostics.removed);
  EXPECT_EQ(ra.mean, rb.mean);
  EXPECT_GT(ra.diagnostics.removed_count, 0);
}

TEST(SpectralFilter, RejectsBadInput) {
  Stream rng(1);
  EXPECT_RPB_ERROR(SpectralFilter(Matrix(2, 0), 1.0, rng), ErrorCode::kInvalidArgument);
  EXPECT_RPB_ERROR(SpectralFilter(Matrix::Zero(2, 3), -1.0, rng),
                   ErrorCode::kInvalidArgument);
}

TEST(RobustLeastSquares, BasisNoiselessIsExact) {
  const int d = 4;
  Vector theta(d);
  theta << 0.3, -0.5, 0.1, 0.7;
  const ActionSet query(Matrix::Identity(d, d));
  std::vector<Vector> actions;
  std::vector<double> rewards;
  for (int i = 0; i < d; ++i) {
    actions.push_back(Vector::Unit(d, i));
    rewards.push_back(theta(i));
  }
  Stream rng(1);
  const RobustEstimate est = RobustLeastSquares(query, actions, rewards, rng);
  EXPECT_LT((est.theta - theta).norm(), 1e-10);
  EXPECT_EQ(est.diagnostics.removed_count, 0);
}

TEST(RobustLeastSquares, ZeroRewards) {
  std::mt19937_64 gen(2);
  Sample s = CleanSample(3, 6, 30, Vector::Zero(3), 0.0, gen);
  Stream rng(1);
  const RobustEstimate est = RobustLeastSquares(s.query, s.actions, s.rewards, rng);
  EXPECT_EQ(est.lambda_used, 0.0);
  EXPECT_EQ(est.theta.norm(), 0.0);
}

TEST(RobustLeastSquares, AgreesWithVanillaOnCleanData) {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<int> dim(1, 8);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = dim(gen);
    const int k = d + static_cast<int>(gen() % 20);
    const int n = k + static_cast<int>(gen() % (500 - k));
    const Vector theta = testing::RandomUnitColumns(d, 1, gen).col(0) * 0.8;
    Sample s = CleanSample(d, k, n, theta, 1.0, gen);
    Stream rng(static_cast<std::uint64_t>(trial));
    const RobustEstimate est = RobustLeastSquares(s.query, s.actions, s.rewards, rng);
    ASSERT_EQ(est.diagnostics.removed_count, 0) << "trial " << trial;
    const Vector vanilla = VanillaLeastSquares(s.query, s.actions, s.rewards);
    EXPECT_LT(MNorm(est.theta - vanilla, est.gram), 1e-8);
  }
}

TEST(RobustLeastSquares, RotationEquivariantOnCleanPath) {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 5;
    const Vector theta = testing::RandomUnitColumns(d, 1, gen).col(0) * 0.5;
    Sample s = CleanSample(d, 12, 200, theta, 1.0, gen);
    const Matrix q = testing::RandomOrthogonal(d, gen);
    std::vector<Vector> rotated;
    for (const Vector& a : s.actions) rotated.push_back(q * a);
    const ActionSet rquery(q * s.query.matrix());
    Stream r1(5);
    Stream r2(5);
    const RobustEstimate e1 = RobustLeastSquares(s.query, s.actions, s.rewards, r1);
    const RobustEstimate e2 = RobustLeastSquares(rquery, rotated, s.rewards, r2);
    ASSERT_EQ(e1.diagnostics.removed_count, 0);
    ASSERT_EQ(e2.diagnostics.removed_count, 0);
    EXPECT_LT((q * e1.theta - e2.theta).norm(), 1e-9);
  }
}

TEST(RobustLeastSquares, SingularGram) {
  std::vector<Vector> actions{Vector::Unit(2, 0)};
  std::vector<double> rewards{1.0};
  Stream rng(1);
  EXPECT_RPB_ERROR(
      RobustLeastSquares(ActionSet(Matrix::Identity(2, 2)), actions, rewards, rng),
      ErrorCode::kSingularGram);
  EXPECT_RPB_ERROR(VanillaLeastSquares(ActionSet(Matrix::Identity(2, 2)), actions, rewards),
                   ErrorCode::kSingularGram);
}

TEST(RobustLeastSquares, LambdaClipOnlyTouchesLambda) {
  std::mt19937_64 gen(3);
  Sample s = CleanSample(3, 6, 100, Vector::Unit(3, 0) * 0.5, 1.0, gen);
  s.rewards[0] = 50.0;
  RobustOptions clipped;
  clipped.lambda_reward_clip = 2.0;
  Stream r1(1);
  Stream r2(1);
  const RobustEstimate plain = RobustLeastSquares(s.query, s.actions, s.rewards, r1);
  const RobustEstimate clip = RobustLeastSquares(s.query, s.actions, s.rewards, r2, clipped);
  EXPECT_LT(clip.lambda_used, plain.lambda_used);
}

TEST(VanillaLeastSquares, NoiselessRecoversTheta) {
  std::mt19937_64 gen(5);
  const Vector theta = testing::RandomUnitColumns(4, 1, gen).col(0);
  Sample s = CleanSample(4, 10, 40, theta, 0.0, gen);
  EXPECT_LT((VanillaLeastSquares(s.query, s.actions, s.rewards) - theta).norm(), 1e-10);
}

TEST(VanillaLeastSquares, SingleActionRestrictedToSpan) {
  Matrix q(3, 1);
  q << 1, 0, 0;
  std::vector<Vector> actions{Vector::Unit(3, 0)};
  std::vector<double> rewards{3.0};
  const Vector est = VanillaLeastSquares(ActionSet(q), actions, rewards);
  EXPECT_NEAR(est(0), 3.0, 1e-12);
  EXPECT_EQ(est(1), 0.0);
  EXPECT_EQ(est(2), 0.0);
}

TEST(VanillaLeastSquares, MatchesQrSolve) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 6;
    const Vector theta = testing::RandomUnitColumns(d, 1, gen).col(0);
    Sample s = CleanSample(d, 3 * d, 60, theta, 1.0, gen);
    Matrix x(static_cast<Eigen::Index>(s.actions.size()), d);
    Vector y(static_cast<Eigen::Index>(s.actions.size()));
    for (std::size_t i = 0; i < s.actions.size(); ++i) {
      x.row(static_cast<Eigen::Index>(i)) = s.actions[i].transpose();
      y(static_cast<Eigen::Index>(i)) = s.rewards[i];
    }
    const Vector oracle = x.householderQr().solve(y);
    EXPECT_LT((VanillaLeastSquares(s.query, s.actions, s.rewards) - oracle).norm(), 1e-9);
  }
}

TEST(ConfidenceRadius, GoldenValue) {
  // mu = 2d/n with d = 5, n = 1000; ||y||^2 = n.
  const double v = ConfidenceRadiusFromParts(0.01, std::sqrt(1000.0), 1000, 0.05, 0.01);
  EXPECT_NEAR(v, 2.538517631196328, 1e-12);
}

TEST(ConfidenceRadius, CleanPartScalesWithRootN) {
  // ||y|| ~ sqrt(n) and mu ~ 1/n: the bound behaves like sqrt(log 2 / n).
  const auto at = [](int n) {
    return ConfidenceRadiusFromParts(5.0 / n, std::sqrt(static_cast<double>(n)), n, 0.0, 0.5);
  };
  for (int n : {1000, 10000, 100000}) {
    EXPECT_NEAR(at(n) / at(2 * n), std::sqrt(2.0), 0.05 * std::sqrt(2.0));
  }
}

TEST(ConfidenceRadius, MonotoneInAlpha) {
  double prev = -1.0;
  for (double a = 0.0; a < 0.25; a += 0.01) {
    const double v = ConfidenceRadiusFromParts(0.01, 30.0, 1000, a, 0.1);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(ConfidenceRadius, Preconditions) {
  EXPECT_RPB_ERROR(ConfidenceRadiusFromParts(0.1, 1.0, 10, 0.25, 0.1),
                   ErrorCode::kInvalidArgument);
  EXPECT_RPB_ERROR(ConfidenceRadiusFromParts(0.1, 1.0, 10, 0.1, 1.0),
                   ErrorCode::kInvalidArgument);
}

TEST(ConfidenceRadius, BoundUsesSampleLeverage) {
  std::mt19937_64 gen(8);
  Sample s = CleanSample(3, 5, 50, Vector::Unit(3, 1), 1.0, gen);
  const Matrix gram = GramOf(s.actions);
  double mu = 0.0;
  for (int j = 0; j < s.query.size(); ++j) {
    const Vector a = s.query.action(j);
    mu = std::max(mu, a.dot(gram.ldlt().solve(a)));
  }
  double ss = 0.0;
  for (double y : s.rewards) ss += y * y;
  EXPECT_NEAR(ConfidenceRadiusBound(s.query, s.actions, s.rewards, 0.1, 0.05),
              ConfidenceRadiusFromParts(mu, std::sqrt(ss), 50, 0.1, 0.05), 1e-10);
}

}  // namespace
}  // namespace rpbandit
