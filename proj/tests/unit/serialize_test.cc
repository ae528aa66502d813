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
#include <limits>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dis2/error.h"
#include "dis2/serialize.h"

namespace dis2 {
namespace {

using nlohmann::json;

json Reparse(const json& j) { return json::parse(j.dump()); }

TEST(Serialize, NonFiniteNumbers) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(NumberToJson(inf), "inf");
  EXPECT_EQ(NumberToJson(-inf), "-inf");
  EXPECT_EQ(NumberToJson(std::nan("")), "nan");
  EXPECT_EQ(NumberFromJson("-inf"), -inf);
  EXPECT_TRUE(std::isnan(NumberFromJson("nan")));
  EXPECT_EQ(NumberFromJson(0.25), 0.25);
  EXPECT_THROW(NumberFromJson("infinity"), Error);
  EXPECT_THROW(NumberFromJson(json::array()), Error);
}

TEST(Serialize, TrainConfigRoundTrip) {
  TrainConfig c;
  c.learning_rate = 0.003;
  c.epochs = 7;
  c.batch_size = 64;
  c.weight_decay = 1e-4;
  c.seed = 12345678901234ULL;
  c.optimizer = Optimizer::kAdam;
  c.loss_variant = LossVariant::kDbat;
  c.normalize_source_loss = true;
  c.momentum = 0.5;
  const TrainConfig back = TrainConfigFromJson(Reparse(ToJson(c)));
  EXPECT_EQ(ToJson(back), ToJson(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_THROW(TrainConfigFromJson(json{{"epochs", 3}}), Error);
}

TEST(Serialize, BoundReportRoundTripIsExact) {
  const BoundReport r = MakeBoundReport(0.1234567890123, 0.0987654321, 2000, 1500, 0.05);
  const BoundReport back = BoundReportFromJson(Reparse(ToJson(r)));
  EXPECT_EQ(back.source_error, r.source_error);
  EXPECT_EQ(back.discrepancy, r.discrepancy);
  EXPECT_EQ(back.concentration, r.concentration);
  EXPECT_EQ(back.bound_with_delta, r.bound_with_delta);
  EXPECT_EQ(back.n_target, 1500);
  EXPECT_EQ(back.delta, 0.05);
}

TEST(Serialize, RecordRoundTrip) {
  EvaluationRecord r;
  r.shift_id = "synth-00003";
  r.group = "g3";
  r.true_target_error = 0.3;
  r.n_source = 10;
  r.n_target = 20;
  r.estimates[Method::kAtcNe] = ErrorEstimate{
      Method::kAtcNe, 0.25, {{"threshold", -std::numeric_limits<double>::infinity()}}};
  r.estimates[Method::kDis2] = ErrorEstimate{Method::kDis2, 0.41, {{"validity_score", 1.0}}};
  r.bound = MakeBoundReport(0.1, 0.2, 10, 20, 0.01);
  r.certificate = Certificate::kInconclusive;
  const EvaluationRecord back = EvaluationRecordFromJson(Reparse(ToJson(r)));
  EXPECT_EQ(ToJson(back).dump(), ToJson(r).dump());
  EXPECT_EQ(back.Find(Method::kAtcNe)->metadata.at("threshold"),
            -std::numeric_limits<double>::infinity());
  EXPECT_EQ(back.certificate, Certificate::kInconclusive);
  json bad = ToJson(r);
  bad["estimates"][0]["method"] = "GDE";
  EXPECT_THROW(EvaluationRecordFromJson(bad), Error);
}

TEST(Serialize, AdjustmentParamsRoundTrip) {
  AdjustmentParams p;
  p.mode = AdjustmentMode::kScale;
  p.value = 1.75;
  p.alpha = 0.9;
  p.trained_on = {"a", "b"};
  p.saturated = true;
  const AdjustmentParams back = AdjustmentParamsFromJson(Reparse(ToJson(p)));
  EXPECT_EQ(back.mode, p.mode);
  EXPECT_EQ(back.value, p.value);
  EXPECT_EQ(back.trained_on, p.trained_on);
  EXPECT_TRUE(back.saturated);
}

TEST(Serialize, SummaryAndSweepShapes) {
  MetricsSummary s;
  s.records = 3;
  s.methods.push_back({Method::kCot, 3, 0.1, 0.5, 0.2});
  const json js = ToJson(s);
  EXPECT_EQ(js["methods"][0]["method"], "COT");
  EXPECT_EQ(js["records"], 3);
  SweepResult sw;
  sw.records.push_back({4, 2, MakeBoundReport(0.1, 0.1, 5, 5, 0.1), 0.9});
  const json jw = ToJson(sw);
  EXPECT_EQ(jw["records"][0]["p"], 2);
  EXPECT_EQ(jw["records"][0]["validity_score"], 0.9);
}

}  // namespace
}  // namespace dis2
