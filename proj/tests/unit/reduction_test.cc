// Copyright 2026 The dis2 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dis2/error.h"
#include "dis2/reduction.h"
#include "oracles.h"
#include "small_suite.h"
#include "test_util.h"

namespace dis2 {
namespace {

TEST(FitPca, PointsOnALine) {
  Matrix x(50, 2);
  for (int i = 0; i < 50; ++i) x.row(i) << 1.0 + i, 3.0 + 2.0 * i;
  const PcaBasis b = FitPca(x);
  EXPECT_NEAR(b.components(0, 0), 1 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(b.components(0, 1), 2 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(b.explained_variance(1), 0.0, 1e-9);
  EXPECT_NEAR(b.mean(0), 25.5, 1e-12);
}

TEST(FitPca, OrthonormalSortedAndVarianceConserving) {
  std::mt19937_64 rng(1);
  Matrix x = testing::RandomMatrix(300, 6, rng);
  x.col(2) *= 5.0;
  x.col(4) *= 0.1;
  const PcaBasis b = FitPca(x);
  EXPECT_TRUE((b.components * b.components.transpose())
                  .isApprox(Matrix::Identity(6, 6), 1e-12));
  for (int i = 1; i < 6; ++i) {
    EXPECT_GE(b.explained_variance(i - 1), b.explained_variance(i));
  }
  const Matrix c = x.rowwise() - x.colwise().mean();
  const double trace = c.squaredNorm() / 299.0;
  EXPECT_NEAR(b.explained_variance.sum(), trace, 1e-9 * trace);
  // Sign convention.
  for (int r = 0; r < 6; ++r) {
    Eigen::Index top;
    b.components.row(r).cwiseAbs().maxCoeff(&top);
    EXPECT_GT(b.components(r, top), 0.0);
  }
  // Projected coordinates have the reported variances.
  const Matrix z = b.Project(x);
  for (int r = 0; r < 6; ++r) {
    EXPECT_NEAR(z.col(r).squaredNorm() / 299.0, b.explained_variance(r), 1e-9);
  }
}

TEST(FitPca, FullBasisIsAnIsometry) {
  std::mt19937_64 rng(2);
  const Matrix x = testing::RandomMatrix(40, 5, rng, 3.0);
  const PcaBasis b = FitPca(x);
  const Matrix z = b.Project(x);
  EXPECT_TRUE(b.Reconstruct(z).isApprox(x, 1e-12));
  for (int i = 0; i < 40; ++i) {
    for (int j = i + 1; j < 40; ++j) {
      EXPECT_NEAR((z.row(i) - z.row(j)).norm(), (x.row(i) - x.row(j)).norm(), 1e-10);
    }
  }
}

TEST(FitPca, IsotropicDataSpreadsVarianceEvenly) {
  std::mt19937_64 rng(3);
  const PcaBasis b = FitPca(testing::RandomMatrix(20000, 4, rng));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(b.explained_variance(i), 1.0, 0.06);
}

TEST(FitPca, Isotropic2dSample) {
  std::mt19937_64 rng(31);
  const PcaBasis b = FitPca(testing::RandomMatrix(10000, 2, rng));
  EXPECT_LE(b.explained_variance(0), 1.1 * b.explained_variance(1));
}

TEST(FitPca, TruncateAndShapeErrors) {
  std::mt19937_64 rng(4);
  const PcaBasis b = FitPca(testing::RandomMatrix(30, 5, rng));
  const PcaBasis t = b.Truncate(2);
  EXPECT_EQ(t.retained(), 2);
  EXPECT_TRUE(t.components.isApprox(b.components.topRows(2)));
  EXPECT_THROW(b.Truncate(0), Error);
  EXPECT_THROW(b.Truncate(6), Error);
  EXPECT_THROW(b.Project(Matrix::Zero(3, 4)), Error);
  EXPECT_THROW(FitPca(Matrix::Zero(1, 3)), Error);
}

TEST(CumulativeL1Ratio, Examples) {
  const std::vector<double> rising = {0.2, 0.5, 0.9};
  const std::vector<double> dip = {0.5, 0.4, 0.9};
  const std::vector<double> deep = {0.3, 0.0, 0.6};
  const std::vector<double> peak_first = {0.6, 0.2, 0.5};
  EXPECT_EQ(CumulativeL1Ratio(rising), 1.0);
  EXPECT_NEAR(CumulativeL1Ratio(dip), 0.9 / 1.1, 1e-12);
  EXPECT_NEAR(CumulativeL1Ratio(deep), 0.5, 1e-12);
  EXPECT_EQ(CumulativeL1Ratio(peak_first), 1.0);
  const std::vector<double> wobble = {0.5, 0.8, 0.7, 0.9};
  EXPECT_NEAR(CumulativeL1Ratio(wobble), 0.8182, 1e-4);
  EXPECT_NEAR(CumulativeL1Ratio(wobble), 0.9 / 1.1, 1e-15);
  EXPECT_EQ(CumulativeL1Ratio(std::vector<double>{0.7}), 1.0);
  EXPECT_THROW(CumulativeL1Ratio(std::vector<double>{}), Error);
}

TEST(CumulativeL1Ratio, OneExactlyWhenMonotoneToFirstMax) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::bernoulli_distribution sorted(0.3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(1 + trial % 30);
    for (double& v : a) v = u(rng);
    if (sorted(rng)) std::sort(a.begin(), a.end());
    const double s = CumulativeL1Ratio(a);
    EXPECT_GT(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_EQ(s == 1.0, oracle::MonotoneToFirstMax(a));
    size_t m = 0;
    for (size_t i = 1; i < a.size(); ++i) if (a[i] > a[m]) m = i;
    long double path = a[0];
    for (size_t i = 1; i <= m; ++i) path += std::fabs(a[i] - a[i - 1]);
    if (!oracle::MonotoneToFirstMax(a)) {
      EXPECT_NEAR(s, static_cast<double>(a[m] / path), 1e-12);
    }
  }
}

class SweepTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    shift_ = new ShiftInputs(MakeSuiteShift(testing::SmallSuite(11, 1), 0));
  }
  static void TearDownTestSuite() { delete shift_; }
  static ShiftInputs* shift_;
};
ShiftInputs* SweepTest::shift_ = nullptr;

TEST_F(SweepTest, ComponentCountsAndFallback) {
  const auto grid = testing::SmallGrid();
  const std::vector<int> ks = {1, 2, 4, 16};
  const SweepResult r = SweepPcs(*shift_, ks, grid, 0.01, 1.0);
  ASSERT_EQ(r.records.size(), 4u);
  const int64_t want_p[] = {8, 4, 2, 1};
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.records[i].k, ks[i]);
    EXPECT_EQ(r.records[i].p, want_p[i]);
    EXPECT_GT(r.records[i].validity_score, 0.0);
    EXPECT_LE(r.records[i].validity_score, 1.0);
  }
  ASSERT_TRUE(r.logits_bound && r.selected_bound);
  double best = r.logits_bound->bound_with_delta;
  bool any = false;
  for (const auto& rec : r.records) {
    if (rec.validity_score >= 1.0 && (!any || rec.bound.bound_with_delta < best)) {
      best = rec.bound.bound_with_delta;
      any = true;
    }
  }
  EXPECT_EQ(*r.selected_bound, best);
  EXPECT_EQ(r.selected_k.has_value(), any);
}

TEST_F(SweepTest, ThresholdAboveOneFallsBackToLogits) {
  const auto grid = testing::SmallGrid();
  const std::vector<int> ks = {1};
  const SweepResult r = SweepPcs(*shift_, ks, grid, 0.01, 1.5);
  EXPECT_FALSE(r.selected_k);
  EXPECT_EQ(*r.selected_bound, r.logits_bound->bound_with_delta);
  const SweepResult plain = SweepPcs(*shift_, ks, grid, 0.01);
  EXPECT_FALSE(plain.logits_bound);
  EXPECT_FALSE(plain.selected_bound);
}

TEST_F(SweepTest, RejectsBadKLists) {
  const auto grid = testing::SmallGrid();
  EXPECT_THROW(SweepPcs(*shift_, std::vector<int>{}, grid, 0.01), Error);
  EXPECT_THROW(SweepPcs(*shift_, std::vector<int>{2, 2}, grid, 0.01), Error);
  EXPECT_THROW(SweepPcs(*shift_, std::vector<int>{0}, grid, 0.01), Error);
}

// Fewer components leave the critic less room, so bounds should not grow
// with k on average.
TEST(SweepPcs, BoundsNonincreasingInKOnAverage) {
  const auto grid = testing::SmallGrid();
  std::vector<double> mean(kDefaultPcDivisors.size(), 0.0);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const ShiftInputs shift = MakeSuiteShift(testing::SmallSuite(100 + seed, 1), 0);
    const SweepResult r = SweepPcs(shift, kDefaultPcDivisors, grid, 0.01);
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += r.records[i].bound.bound_with_delta / 20;
  }
  for (size_t i = 1; i < mean.size(); ++i) {
    EXPECT_LE(mean[i], mean[i - 1] + 1e-12) << "k=" << kDefaultPcDivisors[i];
  }
}

}  // namespace
}  // namespace dis2
