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

#include "dis2/metrics.h"

#include <cmath>

#include "dis2/error.h"

namespace dis2 {
namespace {

void RequirePairs(std::span<const double> predicted,
                  std::span<const double> truth) {
  if (predicted.size() != truth.size()) {
    Fail(ErrorKind::kShape, "metrics: prediction/truth length mismatch");
  }
  if (predicted.empty()) Fail(ErrorKind::kDomain, "metrics: no records");
}

void Collect(std::span<const EvaluationRecord> records, Method method,
             std::vector<double>& predicted, std::vector<double>& truth) {
  for (const auto& r : records) {
    if (const ErrorEstimate* e = r.Find(method)) {
      predicted.push_back(e->predicted_error);
      truth.push_back(r.true_target_error);
    }
  }
  if (predicted.empty()) {
    Fail(ErrorKind::kDomain,
         "metrics: no records carry " + std::string(MethodName(method)));
  }
}

template <typename F>
double OnRecords(std::span<const EvaluationRecord> records, Method method,
                 F f) {
  std::vector<double> p, t;
  Collect(records, method, p, t);
  return f(std::span<const double>(p), std::span<const double>(t));
}

}  // namespace

const ErrorEstimate* EvaluationRecord::Find(Method m) const {
  auto it = estimates.find(m);
  return it == estimates.end() ? nullptr : &it->second;
}

double Mae(std::span<const double> predicted, std::span<const double> truth) {
  RequirePairs(predicted, truth);
  double sum = 0.0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    sum += std::abs(predicted[i] - truth[i]);
  }
  return sum / static_cast<double>(predicted.size());
}

double Coverage(std::span<const double> predicted,
                std::span<const double> truth) {
  RequirePairs(predicted, truth);
  int64_t covered = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    covered += predicted[i] >= truth[i];
  }
  return static_cast<double>(covered) / static_cast<double>(predicted.size());
}

double ConditionalOverestimation(std::span<const double> predicted,
                                 std::span<const double> truth) {
  RequirePairs(predicted, truth);
  double sum = 0.0;
  int64_t count = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < truth[i]) {
      sum += truth[i] - predicted[i];
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double Mae(std::span<const EvaluationRecord> records, Method method) {
  return OnRecords(records, method, [](auto p, auto t) { return Mae(p, t); });
}

double Coverage(std::span<const EvaluationRecord> records, Method method) {
  return OnRecords(records, method,
                   [](auto p, auto t) { return Coverage(p, t); });
}

double ConditionalOverestimation(std::span<const EvaluationRecord> records,
                                 Method method) {
  return OnRecords(records, method, [](auto p, auto t) {
    return ConditionalOverestimation(p, t);
  });
}

const MethodMetrics* MetricsSummary::Find(Method m) const {
  for (const auto& mm : methods) {
    if (mm.method == m) return &mm;
  }
  return nullptr;
}

MetricsSummary Summarize(std::span<const EvaluationRecord> records,
                         std::span<const Method> methods,
                         int64_t failed_shifts) {
  MetricsSummary summary;
  summary.records = static_cast<int64_t>(records.size());
  summary.failed_shifts = failed_shifts;
  for (Method m : methods) {
    std::vector<double> p, t;
    for (const auto& r : records) {
      if (const ErrorEstimate* e = r.Find(m)) {
        p.push_back(e->predicted_error);
        t.push_back(r.true_target_error);
      }
    }
    if (p.empty()) continue;
    MethodMetrics mm;
    mm.method = m;
    mm.count = static_cast<int64_t>(p.size());
    mm.mae = Mae(p, t);
    mm.coverage = Coverage(p, t);
    mm.conditional_overestimation = ConditionalOverestimation(p, t);
    summary.methods.push_back(mm);
  }
  return summary;
}

double ViolationRate(std::span<const EvaluationRecord> records, double delta) {
  int64_t with_bound = 0, violated = 0;
  for (const auto& r : records) {
    if (!r.bound) continue;
    ++with_bound;
    violated += r.bound->WithDelta(delta).bound_with_delta < r.true_target_error;
  }
  if (with_bound == 0) Fail(ErrorKind::kDomain, "no records carry a bound");
  return static_cast<double>(violated) / static_cast<double>(with_bound);
}

}  // namespace dis2
