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

// JSON forms of reports, records and configs. Non-finite numbers are
// written as the strings "inf", "-inf" and "nan".

#ifndef DIS2_SERIALIZE_H_
#define DIS2_SERIALIZE_H_

#include <nlohmann/json.hpp>

#include "dis2/baselines.h"
#include "dis2/bound.h"
#include "dis2/critic.h"
#include "dis2/loocv.h"
#include "dis2/metrics.h"
#include "dis2/reduction.h"

namespace dis2 {

nlohmann::json NumberToJson(double x);
double NumberFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const TrainConfig& c);
TrainConfig TrainConfigFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const BoundReport& r);
BoundReport BoundReportFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const ErrorEstimate& e);
ErrorEstimate ErrorEstimateFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const EvaluationRecord& r);
EvaluationRecord EvaluationRecordFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const MetricsSummary& s);

nlohmann::json ToJson(const SweepResult& s);

nlohmann::json ToJson(const AdjustmentParams& p);
AdjustmentParams AdjustmentParamsFromJson(const nlohmann::json& j);

nlohmann::json ToJson(const LoocvResult& r);

}  // namespace dis2

#endif  // DIS2_SERIALIZE_H_
