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
#include <vector>

#include <gtest/gtest.h>

#include "dis2/error.h"
#include "dis2/synth.h"
#include "oracles.h"

namespace dis2 {
namespace {

SynthConfig TwoClass(double shift, Vector direction, uint64_t seed) {
  SynthConfig c;
  c.classes = 2;
  c.dim = 2;
  c.source_per_class = 5000;
  c.target_total = 10000;
  c.separation = 3.0;
  c.shift_scale = shift;
  c.shift_direction = direction;
  c.seed = seed;
  return c;
}

double TargetError(const SynthConfig& c) {
  const auto [source, target] = GenerateSyntheticShift(c);
  const auto clf = ClassifierUnderTest::FromHead(FitLinearProbe(source));
  return ErrorRate(clf.Predict(target), *target.labels);
}

TEST(SyntheticClassMeans, PairwiseSeparation) {
  SynthConfig c;
  c.classes = 4;
  c.dim = 8;
  c.separation = 3.0;
  const Matrix m = SyntheticClassMeans(c);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) EXPECT_NEAR((m.row(i) - m.row(j)).norm(), 3.0, 1e-12);
  }
}

TEST(GenerateSyntheticShift, ShapesLabelsAndTags) {
  SynthConfig c;
  c.classes = 3;
  c.dim = 4;
  c.source_per_class = 20;
  c.target_total = 7;
  c.class_weights = {0.5, 0.3, 0.2};
  EXPECT_EQ(TargetClassCounts(c), (std::vector<int64_t>{4, 2, 1}));
  const auto [s, t] = GenerateSyntheticShift(c);
  EXPECT_EQ(s.n(), 60);
  EXPECT_EQ(t.n(), 7);
  EXPECT_EQ(s.d(), 4);
  EXPECT_EQ(s.domain_tag, "source");
  EXPECT_EQ(t.domain_tag, "target");
  std::vector<int> counts(3);
  for (int y : *t.labels) ++counts[static_cast<size_t>(y)];
  EXPECT_EQ(counts, (std::vector<int>{4, 2, 1}));
  s.Validate();
  t.Validate();
}

TEST(GenerateSyntheticShift, DeterministicInSeed) {
  SynthConfig c;
  c.seed = 9;
  c.shift_scale = 1.0;
  c.rotation_angle = 0.3;
  const auto a = GenerateSyntheticShift(c);
  const auto b = GenerateSyntheticShift(c);
  EXPECT_EQ(a.first.features, b.first.features);
  EXPECT_EQ(a.second.features, b.second.features);
  EXPECT_EQ(*a.second.labels, *b.second.labels);
  c.seed = 10;
  EXPECT_NE(GenerateSyntheticShift(c).second.features, a.second.features);
}

TEST(GenerateSyntheticShift, ZeroShiftMatchesBayesError) {
  Vector dir(2);
  dir << 1, 0;
  const double bayes = oracle::TwoGaussianShiftedError(3.0, 1.0, 0.0);
  EXPECT_NEAR(TargetError(TwoClass(0.0, dir, 1)), bayes, 0.02);
}

TEST(GenerateSyntheticShift, ShiftAcrossBoundaryMatchesGaussianOracle) {
  // Means sit on the axes, so class 0 -> class 1 runs along (-1, 1).
  Vector across(2);
  across << -1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const double base = TargetError(TwoClass(0.0, across, 2));
  for (double s : {0.5, 1.0, 1.5}) {
    const double err = TargetError(TwoClass(s, across, 3));
    EXPECT_NEAR(err, oracle::TwoGaussianShiftedError(3.0, 1.0, s), 0.02) << s;
    EXPECT_GE(err, base + 0.2 * base) << s;
  }
}

// The documented scale: a shift of 2 (two thirds of the mean separation)
// across the boundary.
TEST(GenerateSyntheticShift, AccuracyDropsAtDocumentedScale) {
  Vector across(2);
  across << -1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const double predicted_drop = oracle::TwoGaussianShiftedError(3.0, 1.0, 2.0) -
                                oracle::TwoGaussianShiftedError(3.0, 1.0, 0.0);
  ASSERT_GE(predicted_drop, 0.2);
  const double drop = TargetError(TwoClass(2.0, across, 5)) - TargetError(TwoClass(0.0, across, 5));
  EXPECT_GE(drop, 0.2);
  EXPECT_NEAR(drop, predicted_drop, 0.03);
}

TEST(GenerateSyntheticShift, ShiftAlongBoundaryKeepsError) {
  Vector along(2);
  along << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  EXPECT_NEAR(TargetError(TwoClass(2.0, along, 4)),
              oracle::TwoGaussianShiftedError(3.0, 1.0, 0.0), 0.02);
}

TEST(SynthConfig, RejectsBadSettings) {
  SynthConfig c;
  c.class_weights = {0.7, 0.7};
  EXPECT_THROW(c.Validate(), Error);
  c.class_weights = {1.2, -0.2};
  EXPECT_THROW(c.Validate(), Error);
  c.class_weights = {1.0};
  EXPECT_THROW(c.Validate(), Error);
  c.class_weights = {};
  c.noise = -1;
  EXPECT_THROW(GenerateSyntheticShift(c), Error);
}

TEST(FitLinearProbe, SeparatesWellSplitClusters) {
  SynthConfig c;
  c.classes = 3;
  c.dim = 5;
  c.separation = 10.0;
  const auto [s, t] = GenerateSyntheticShift(c);
  const LinearHead h = FitLinearProbe(s);
  EXPECT_EQ(h.classes(), 3);
  EXPECT_EQ(h.input_dim(), 5);
  EXPECT_LT(ErrorRate(ClassifierUnderTest::FromHead(h).Predict(t), *t.labels), 0.01);
}

}  // namespace
}  // namespace dis2
