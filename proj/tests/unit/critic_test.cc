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

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "dis2/critic.h"
#include "dis2/error.h"
#include "dis2/shift.h"
#include "dis2/softmax.h"
#include "dis2/synth.h"
#include "oracles.h"
#include "test_util.h"

namespace dis2 {
namespace {

TEST(Discrepancy, CountingHandCase) {
  const Labels hs = {0, 0, 1, 1}, ht = {0, 1};
  const Labels cs = {0, 0, 1, 0}, ct = {1, 0};
  const double want = oracle::DisagreementRate({0, 1}, {1, 0}) -
                      oracle::DisagreementRate({0, 0, 1, 1}, {0, 0, 1, 0});
  EXPECT_DOUBLE_EQ(want, 0.75);
  EXPECT_DOUBLE_EQ(DiscrepancyFromPredictions(hs, cs, ht, ct), want);
  EXPECT_DOUBLE_EQ(DiscrepancyFromPredictions(cs, hs, ct, ht), want);
}

TEST(Discrepancy, CriticEqualToClassifierIsZero) {
  std::mt19937_64 rng(1);
  const LinearHead head{testing::RandomMatrix(3, 4, rng), Vector::Zero(3)};
  const Matrix xs = testing::RandomMatrix(50, 4, rng);
  const Matrix xt = testing::RandomMatrix(40, 4, rng);
  const LinearCritic critic{head, {InputSpaceKind::kFeatures, 4}};
  EXPECT_EQ(EmpiricalDiscrepancy(critic, ArgmaxRows(head.Apply(xs)),
                                 ArgmaxRows(head.Apply(xt)), xs, xt),
            0.0);
  EXPECT_THROW(EmpiricalDiscrepancy(critic, Labels(3, 0), Labels(40, 0), xs, xt),
               Error);
}

TEST(SelectBestCritic, MaxWithLowestIndexTies) {
  auto make = [](std::vector<double> d) {
    std::vector<CriticFitResult> r(d.size());
    for (size_t i = 0; i < d.size(); ++i) r[i].holdout_discrepancy = d[i];
    return r;
  };
  EXPECT_EQ(SelectBestCriticIndex(make({0.1, 0.4, 0.2})), 1u);
  EXPECT_EQ(SelectBestCriticIndex(make({0.3, 0.3})), 0u);
  EXPECT_EQ(SelectBestCriticIndex(make({-0.2})), 0u);
  EXPECT_THROW(SelectBestCriticIndex(make({})), Error);
}

// Two-class source along x0; target sits at (3, 8), on the class-1 side of
// the classifier but far off the source manifold along x1.
struct FlipFixture {
  CriticProblem problem;
  LinearHead classifier;
};

FlipFixture MakeFlipProblem(uint64_t seed, int64_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.5);
  auto sample_source = [&](int64_t count) {
    Matrix x(count, 2);
    for (int64_t i = 0; i < count; ++i) {
      x(i, 0) = (i % 2 == 0 ? -3.0 : 3.0) + noise(rng);
      x(i, 1) = noise(rng);
    }
    return x;
  };
  auto sample_target = [&](int64_t count) {
    Matrix x(count, 2);
    for (int64_t i = 0; i < count; ++i) {
      x(i, 0) = 3.0 + noise(rng);
      x(i, 1) = 8.0 + noise(rng);
    }
    return x;
  };
  FlipFixture f;
  f.classifier.weights.resize(2, 2);
  f.classifier.weights << -1, 0, 1, 0;
  f.classifier.bias = Vector::Zero(2);
  CriticProblem& p = f.problem;
  p.classes = 2;
  p.input_space = {InputSpaceKind::kFeatures, 2};
  p.source_train = sample_source(n);
  p.target_train = sample_target(n);
  p.source_holdout = sample_source(n);
  p.target_holdout = sample_target(n);
  p.source_train_pseudo = ArgmaxRows(f.classifier.Apply(p.source_train));
  p.target_train_pseudo = ArgmaxRows(f.classifier.Apply(p.target_train));
  p.source_holdout_pseudo = ArgmaxRows(f.classifier.Apply(p.source_holdout));
  p.target_holdout_pseudo = ArgmaxRows(f.classifier.Apply(p.target_holdout));
  p.initial_head = f.classifier;
  return f;
}

TEST(TrainCritic, FindsLabelFlippingCritic) {
  const FlipFixture f = MakeFlipProblem(2, 400);
  // Oracle: predict 1 iff x0 - 0.75 x1 > 0, which agrees with the classifier
  // on the source strip and disagrees on the whole target cluster.
  Labels cs, ct;
  for (int64_t i = 0; i < f.problem.source_holdout.rows(); ++i) {
    const auto& x = f.problem.source_holdout;
    cs.push_back(x(i, 0) - 0.75 * x(i, 1) > 0 ? 1 : 0);
  }
  for (int64_t i = 0; i < f.problem.target_holdout.rows(); ++i) {
    const auto& x = f.problem.target_holdout;
    ct.push_back(x(i, 0) - 0.75 * x(i, 1) > 0 ? 1 : 0);
  }
  const double oracle_disc =
      oracle::DisagreementRate(
          {f.problem.target_holdout_pseudo.begin(), f.problem.target_holdout_pseudo.end()},
          {ct.begin(), ct.end()}) -
      oracle::DisagreementRate(
          {f.problem.source_holdout_pseudo.begin(), f.problem.source_holdout_pseudo.end()},
          {cs.begin(), cs.end()});
  ASSERT_GE(oracle_disc, 0.8);

  const auto grid = DefaultSearchGrid();
  const CriticSearchResult r = RunCriticSearch(f.problem, grid);
  EXPECT_GE(r.selected().holdout_discrepancy, 0.8);
  // Stored value is recomputable from the stored critic.
  EXPECT_DOUBLE_EQ(
      r.selected().holdout_discrepancy,
      EmpiricalDiscrepancy(r.selected().critic, f.problem.source_holdout_pseudo,
                           f.problem.target_holdout_pseudo,
                           f.problem.source_holdout, f.problem.target_holdout));
}

CriticProblem SameDistributionProblem(uint64_t seed, int64_t n, bool identical) {
  std::mt19937_64 rng(seed);
  const LinearHead head{testing::RandomMatrix(3, 4, rng), Vector::Zero(3)};
  CriticProblem p;
  p.classes = 3;
  p.input_space = {InputSpaceKind::kFeatures, 4};
  p.source_train = testing::RandomMatrix(n, 4, rng);
  p.target_train = identical ? p.source_train : testing::RandomMatrix(n, 4, rng);
  p.source_holdout = testing::RandomMatrix(n, 4, rng);
  p.target_holdout = identical ? p.source_holdout : testing::RandomMatrix(n, 4, rng);
  p.source_train_pseudo = ArgmaxRows(head.Apply(p.source_train));
  p.target_train_pseudo = ArgmaxRows(head.Apply(p.target_train));
  p.source_holdout_pseudo = ArgmaxRows(head.Apply(p.source_holdout));
  p.target_holdout_pseudo = ArgmaxRows(head.Apply(p.target_holdout));
  p.initial_head = head;
  return p;
}

TEST(TrainCritic, NoShiftMeansNoDiscrepancy) {
  const auto grid = DefaultSearchGrid();
  const CriticSearchResult same = RunCriticSearch(SameDistributionProblem(3, 500, true), grid);
  EXPECT_EQ(same.selected().holdout_discrepancy, 0.0);
  const CriticSearchResult iid = RunCriticSearch(SameDistributionProblem(4, 2000, false), grid);
  EXPECT_LE(iid.selected().holdout_discrepancy, 0.05);
}

TEST(TrainCritic, DeterministicUnderSeed) {
  const CriticProblem p = MakeFlipProblem(5, 200).problem;
  TrainConfig c;
  c.epochs = 8;
  c.seed = 42;
  c.optimizer = Optimizer::kAdam;
  const CriticFitResult a = TrainCritic(p, c);
  const CriticFitResult b = TrainCritic(p, c);
  EXPECT_EQ(a.agreement_trajectory, b.agreement_trajectory);
  EXPECT_EQ(a.objective_trajectory, b.objective_trajectory);
  EXPECT_EQ(a.critic.head.weights, b.critic.head.weights);
  EXPECT_EQ(a.agreement_trajectory.size(), 8u);
}

TEST(TrainCritic, NormalizedObjectiveLowerBoundsDiscrepancy) {
  const CriticProblem p = MakeFlipProblem(6, 300).problem;
  for (Optimizer opt : {Optimizer::kSgdMomentum, Optimizer::kAdam}) {
    TrainConfig c;
    c.epochs = 20;
    c.normalize_source_loss = true;
    c.optimizer = opt;
    c.learning_rate = 0.05;
    const CriticFitResult r = TrainCritic(p, c);
    ASSERT_EQ(r.objective_trajectory.size(), r.train_discrepancy_trajectory.size());
    for (size_t e = 0; e < r.objective_trajectory.size(); ++e) {
      EXPECT_LE(1.0 - r.objective_trajectory[e],
                r.train_discrepancy_trajectory[e] + 1e-12)
          << "epoch " << e;
    }
  }
}

TEST(TrainCritic, DivergenceNamesEpoch) {
  CriticProblem p = MakeFlipProblem(7, 100).problem;
  p.initial_head.reset();
  TrainConfig c;
  c.learning_rate = 1e308;
  c.epochs = 5;
  try {
    TrainCritic(p, c);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(TrainCritic, RotationInvariantSearch) {
  SynthConfig sc;
  sc.classes = 3;
  sc.dim = 5;
  sc.source_per_class = 400;
  sc.target_total = 1200;
  sc.shift_scale = 1.5;
  sc.seed = 8;
  auto [source, target] = GenerateSyntheticShift(sc);
  auto [s_train, s_val] = SplitHoldout(source, 0.5, 1);
  auto [t_train, t_val] = SplitHoldout(target, 0.5, 2);
  const LinearHead head = FitLinearProbe(s_train);

  std::mt19937_64 rng(9);
  const Eigen::MatrixXd q =
      Eigen::HouseholderQR<Eigen::MatrixXd>(testing::RandomMatrix(5, 5, rng))
          .householderQ();
  auto build = [&](const Eigen::MatrixXd& rot) {
    CriticProblem p;
    p.classes = 3;
    p.input_space = {InputSpaceKind::kFeatures, 5};
    p.source_train = s_train.features * rot.transpose();
    p.target_train = t_train.features * rot.transpose();
    p.source_holdout = s_val.features * rot.transpose();
    p.target_holdout = t_val.features * rot.transpose();
    p.source_train_pseudo = ArgmaxRows(head.Apply(s_train.features));
    p.target_train_pseudo = ArgmaxRows(head.Apply(t_train.features));
    p.source_holdout_pseudo = ArgmaxRows(head.Apply(s_val.features));
    p.target_holdout_pseudo = ArgmaxRows(head.Apply(t_val.features));
    p.initial_head = LinearHead{head.weights * rot.transpose(), head.bias};
    return p;
  };
  const auto grid = DefaultSearchGrid();
  const double plain =
      RunCriticSearch(build(Eigen::MatrixXd::Identity(5, 5)), grid).selected().holdout_discrepancy;
  const double rotated = RunCriticSearch(build(q), grid).selected().holdout_discrepancy;
  EXPECT_NEAR(plain, rotated, 0.02);
}

TEST(TrainCritic, OnlyConsumesClassifierPredictions) {
  SynthConfig sc;
  sc.classes = 3;
  sc.dim = 4;
  sc.source_per_class = 150;
  sc.target_total = 400;
  sc.shift_scale = 2.0;
  sc.seed = 10;
  auto [source, target] = GenerateSyntheticShift(sc);
  ShiftInputs shift;
  shift.id = "pseudo";
  std::tie(shift.source_train, shift.source_val) = SplitHoldout(source, 0.5, 1);
  std::tie(shift.target_train, shift.target_val) = SplitHoldout(target, 0.5, 2);
  shift.classifier = ClassifierUnderTest::FromHead(FitLinearProbe(shift.source_train));
  std::vector<TrainConfig> grid(2);
  grid[1].optimizer = Optimizer::kAdam;
  const Dis2Result a = EvaluateDis2(shift, {InputSpaceKind::kFeatures, 0}, grid, 0.01);

  // Scramble every label the critic could see; only source_val labels feed
  // the source-error term, so keep those.
  for (auto* d : {&shift.source_train, &shift.target_train}) {
    for (auto& y : *d->labels) y = (y + 1) % 3;
  }
  shift.target_val.labels.reset();
  const Dis2Result b = EvaluateDis2(shift, {InputSpaceKind::kFeatures, 0}, grid, 0.01);
  EXPECT_EQ(a.report.discrepancy, b.report.discrepancy);
  EXPECT_EQ(a.search.selected().agreement_trajectory,
            b.search.selected().agreement_trajectory);
}

TEST(TrainCritic, ValidatesConfigAndProblem) {
  CriticProblem p = MakeFlipProblem(11, 20).problem;
  TrainConfig c;
  c.epochs = 0;
  EXPECT_THROW(TrainCritic(p, c), Error);
  c = TrainConfig();
  c.learning_rate = -1;
  EXPECT_THROW(TrainCritic(p, c), Error);
  p.target_train_pseudo.pop_back();
  EXPECT_THROW(TrainCritic(p, TrainConfig()), Error);
}

TEST(DefaultSearchGrid, EighteenConfigs) {
  const auto grid = DefaultSearchGrid(LossVariant::kDbat);
  EXPECT_EQ(grid.size(), 18u);
  for (const auto& c : grid) {
    EXPECT_EQ(c.epochs, 50);
    EXPECT_EQ(c.batch_size, 256);
    EXPECT_EQ(c.weight_decay, 0.0);
    EXPECT_EQ(c.loss_variant, LossVariant::kDbat);
  }
}

TEST(InputSpace, ParseAndFormat) {
  EXPECT_EQ(InputSpace::Parse("features")->kind, InputSpaceKind::kFeatures);
  EXPECT_EQ(InputSpace::Parse("logits")->kind, InputSpaceKind::kLogits);
  const auto pcs = InputSpace::Parse("top_pcs(12)");
  ASSERT_TRUE(pcs);
  EXPECT_EQ(pcs->dim, 12);
  EXPECT_EQ(pcs->ToString(), "top_pcs(12)");
  EXPECT_FALSE(InputSpace::Parse("top_pcs(0)"));
  EXPECT_FALSE(InputSpace::Parse("top_pcs(x)"));
  EXPECT_FALSE(InputSpace::Parse("pixels"));
}

TEST(CriticCheckpoint, RoundTrips) {
  testing::TempDir dir("critic");
  const CriticProblem p = MakeFlipProblem(12, 100).problem;
  TrainConfig c;
  c.epochs = 3;
  const CriticFitResult r = TrainCritic(p, c);
  SaveCritic(r, dir / "crit");
  const LinearCritic back = LoadCritic(dir / "crit");
  EXPECT_EQ(back.input_space, r.critic.input_space);
  // Weights are stored in single precision.
  EXPECT_TRUE(back.head.weights.isApprox(r.critic.head.weights, 1e-6));
  EXPECT_EQ(back.Predict(p.target_holdout), r.critic.Predict(p.target_holdout));
}

}  // namespace
}  // namespace dis2
