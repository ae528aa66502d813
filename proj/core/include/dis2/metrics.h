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

#ifndef DIS2_METRICS_H_
#define DIS2_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dis2/baselines.h"
#include "dis2/bound.h"

namespace dis2 {

// One shift: every method's prediction against the measured target error.
struct EvaluationRecord {
  std::string shift_id;
  std::string group;
  std::map<Method, ErrorEstimate> estimates;
  // Components of the bound, kept so other confidence levels can be
  // recomputed without retraining.
  std::optional<BoundReport> bound;
  std::optional<Certificate> certificate;
  double true_target_error = 0.0;
  int64_t n_source = 0;
  int64_t n_target = 0;

  const ErrorEstimate* Find(Method m) const;
};

double Mae(std::span<const double> predicted, std::span<const double> truth);
double Coverage(std::span<const double> predicted,
                std::span<const double> truth);
// Mean of (truth - predicted) over pairs with predicted < truth; 0 if none.
double ConditionalOverestimation(std::span<const double> predicted,
                                 std::span<const double> truth);

// Record-level forms. Records without an estimate for `method` are skipped;
// throws kDomain if none remain.
double Mae(std::span<const EvaluationRecord> records, Method method);
double Coverage(std::span<const EvaluationRecord> records, Method method);
double ConditionalOverestimation(std::span<const EvaluationRecord> records,
                                 Method method);

struct MethodMetrics {
  Method method = Method::kAc;
  int64_t count = 0;
  double mae = 0.0;
  double coverage = 0.0;
  double conditional_overestimation = 0.0;
};

struct MetricsSummary {
  int64_t records = 0;
  int64_t failed_shifts = 0;
  std::vector<MethodMetrics> methods;

  const MethodMetrics* Find(Method m) const;
};

// One entry per requested method that appears in at least one record, in
// request order.
MetricsSummary Summarize(std::span<const EvaluationRecord> records,
                         std::span<const Method> methods,
                         int64_t failed_shifts = 0);

// Fraction of records whose bound at `delta` falls below the true error.
// Only records carrying a bound count.
double ViolationRate(std::span<const EvaluationRecord> records, double delta);

}  // namespace dis2

#endif  // DIS2_METRICS_H_
