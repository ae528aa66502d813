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

#include <gtest/gtest.h>

#include "dis2/error.h"
#include "dis2/losses.h"
#include "oracles.h"

namespace dis2 {
namespace {

using oracle::Vec;

TEST(LogisticLoss, Examples) {
  EXPECT_NEAR(LogisticLoss(Vec{0, 0, 0, 0}, 2, true).value, 1.0, 1e-15);
  EXPECT_NEAR(LogisticLoss(Vec{0, 0}, 0, false).value, std::log(2.0), 1e-15);
  const Vec z = {5, 0, 0};
  EXPECT_NEAR(LogisticLoss(z, 0, false).value, oracle::CrossEntropy(z, 0), 1e-14);
  EXPECT_NEAR(LogisticLoss(z, 1, true).value,
              oracle::CrossEntropy(z, 1) / std::log(3.0), 1e-14);
}

TEST(DisagreementLoss, Examples) {
  EXPECT_NEAR(DisagreementLoss(Vec{0, 0}, 0).value, 1.0, 1e-15);
  EXPECT_NEAR(DisagreementLoss(Vec{3, 3, 3}, 1).value, 1.0, 1e-15);
  const double want = std::log1p(std::exp(-10.0)) / std::log(2.0);
  EXPECT_NEAR(DisagreementLoss(Vec{-10, 0}, 0).value, want, 1e-18);
  EXPECT_NEAR(want, 6.54968e-5, 1e-10);
}

TEST(AlternateLosses, Examples) {
  EXPECT_NEAR(DbatLoss(Vec{0, 0}, 0).value, std::log(2.0), 1e-15);
  EXPECT_NEAR(NegXentLoss(Vec{0, 0}, 0).value, std::log(0.5), 1e-15);
  const Vec z = {1, 0, 0};
  EXPECT_NEAR(DbatLoss(z, 0).value, oracle::Dbat(z, 0), 1e-14);
  EXPECT_NEAR(DbatLoss(z, 0).value, std::log1p(std::exp(1.0) / 2.0), 1e-14);
}

TEST(Losses, InvalidClassIdRejected) {
  EXPECT_THROW(DisagreementLoss(Vec{0, 0}, 2), Error);
  EXPECT_THROW(LogisticLoss(Vec{0, 0}, -1, false), Error);
  EXPECT_THROW(DbatLoss(Vec{0}, 0), Error);
  EXPECT_THROW(NegXentLoss(Vec{0, 0, 0}, 3), Error);
}

TEST(Losses, MatchScalarOraclesOnRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> classes(2, 10);
  for (int trial = 0; trial < 2000; ++trial) {
    const int c = classes(rng);
    const Vec z = oracle::RandomLogits(rng, c, 8.0);
    const int y = static_cast<int>(rng() % static_cast<uint64_t>(c));
    EXPECT_NEAR(LogisticLoss(z, y, false).value, oracle::CrossEntropy(z, y), 1e-12);
    EXPECT_NEAR(DisagreementLoss(z, y).value, oracle::Disagreement(z, y), 1e-12);
    EXPECT_NEAR(DbatLoss(z, y).value, oracle::Dbat(z, y), 1e-12);
    EXPECT_NEAR(NegXentLoss(z, y).value, oracle::NegXent(z, y), 1e-12);
  }
}

TEST(DisagreementLoss, UpperBoundsAgreementIndicator) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> classes(2, 10);
  int violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int c = classes(rng);
    const Vec z = oracle::RandomLogits(rng, c, 20.0);
    const int y = static_cast<int>(rng() % static_cast<uint64_t>(c));
    const double indicator = oracle::Argmax(z) == y ? 1.0 : 0.0;
    violations += DisagreementLoss(z, y).value < indicator;
  }
  EXPECT_EQ(violations, 0);
}

TEST(DisagreementLoss, BinaryCaseIsFlippedCrossEntropy) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5000; ++trial) {
    const Vec z = oracle::RandomLogits(rng, 2, 30.0);
    const int y = static_cast<int>(rng() % 2);
    EXPECT_NEAR(DisagreementLoss(z, y).value,
                LogisticLoss(z, 1 - y, false).value / std::log(2.0), 1e-12);
  }
}

TEST(Losses, StableAtExtremeLogits) {
  for (double m : {1e3, 1e4}) {
    const Vec z = {m, -m, 0};
    for (int y = 0; y < 3; ++y) {
      EXPECT_TRUE(std::isfinite(DisagreementLoss(z, y).value));
      EXPECT_TRUE(std::isfinite(LogisticLoss(z, y, true).value));
      EXPECT_TRUE(std::isfinite(DbatLoss(z, y).value));
      EXPECT_TRUE(std::isfinite(NegXentLoss(z, y).value));
      for (double g : DisagreementLoss(z, y).gradient) EXPECT_TRUE(std::isfinite(g));
    }
  }
}

TEST(Losses, GradientsMatchCentralDifferences) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> classes(2, 10);
  for (int trial = 0; trial < 500; ++trial) {
    const int c = classes(rng);
    const Vec z = oracle::RandomLogits(rng, c, 4.0);
    const int y = static_cast<int>(rng() % static_cast<uint64_t>(c));
    const bool norm = trial % 2 == 0;
    const std::pair<std::function<LossEval(const Vec&)>, const char*> losses[] = {
        {[&](const Vec& v) { return LogisticLoss(v, y, norm); }, "logistic"},
        {[&](const Vec& v) { return DisagreementLoss(v, y); }, "dis"},
        {[&](const Vec& v) { return DbatLoss(v, y); }, "dbat"},
        {[&](const Vec& v) { return NegXentLoss(v, y); }, "neg_xent"}};
    for (const auto& [loss, name] : losses) {
      const LossEval e = loss(z);
      const Vec fd = oracle::CentralDifference(
          [&](const Vec& v) { return loss(v).value; }, z);
      for (size_t k = 0; k < z.size(); ++k) {
        EXPECT_LE(oracle::RelativeError(e.gradient[k], fd[k]), 1e-5)
            << name << " k=" << k;
      }
    }
  }
}

TEST(Losses, ConvexAlongSegments) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<int> classes(2, 10);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int trial = 0; trial < 3000; ++trial) {
    const int c = classes(rng);
    const Vec a = oracle::RandomLogits(rng, c, 10.0);
    const Vec b = oracle::RandomLogits(rng, c, 10.0);
    const double l = lam(rng);
    Vec mid(a.size());
    for (size_t k = 0; k < a.size(); ++k) mid[k] = l * a[k] + (1 - l) * b[k];
    const int y = static_cast<int>(rng() % static_cast<uint64_t>(c));
    auto check = [&](auto f) {
      EXPECT_LE(f(mid), l * f(a) + (1 - l) * f(b) + 1e-9);
    };
    check([&](const Vec& v) { return DisagreementLoss(v, y).value; });
    check([&](const Vec& v) { return LogisticLoss(v, y, true).value; });
  }
}

TEST(LossVariant, NamesRoundTrip) {
  for (auto v : {LossVariant::kDis, LossVariant::kDbat, LossVariant::kNegXent}) {
    EXPECT_EQ(ParseLossVariant(LossVariantName(v)), v);
  }
  EXPECT_FALSE(ParseLossVariant("hinge"));
}

}  // namespace
}  // namespace dis2
