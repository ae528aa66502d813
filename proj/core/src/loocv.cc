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

#include "dis2/loocv.h"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <map>

#include "dis2/error.h"

namespace dis2 {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest parameter at which record i is covered.
double Requirement(double p, double t, AdjustmentMode mode) {
  if (mode == AdjustmentMode::kShift) return std::max(0.0, t - p);
  if (p >= t) return 1.0;
  if (t > 1.0 || p <= 0.0) return kInf;
  return std::max(1.0, t / p);
}

int64_t CoveredCount(std::span<const double> predicted,
                     std::span<const double> truth,
                     const AdjustmentParams& params) {
  int64_t c = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    c += params.Apply(predicted[i]) >= truth[i];
  }
  return c;
}

}  // namespace

std::string_view AdjustmentModeName(AdjustmentMode m) {
  return m == AdjustmentMode::kShift ? "shift" : "scale";
}

std::optional<AdjustmentMode> ParseAdjustmentMode(std::string_view name) {
  if (name == "shift") return AdjustmentMode::kShift;
  if (name == "scale") return AdjustmentMode::kScale;
  return std::nullopt;
}

double AdjustmentParams::Apply(double predicted) const {
  if (mode == AdjustmentMode::kShift) return predicted + value;
  return std::min(1.0, value * predicted);
}

AdjustmentParams FitAdjustment(std::span<const double> predicted,
                               std::span<const double> truth, double alpha,
                               AdjustmentMode mode) {
  if (predicted.size() != truth.size()) {
    Fail(ErrorKind::kShape, "adjustment: prediction/truth length mismatch");
  }
  if (predicted.empty()) Fail(ErrorKind::kDomain, "adjustment: no records");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    Fail(ErrorKind::kDomain, "adjustment: alpha must lie in [0, 1]");
  }
  const auto n = static_cast<int64_t>(predicted.size());
  // Guard against alpha * n landing a rounding error above an integer.
  const auto need = static_cast<int64_t>(
      std::ceil(alpha * static_cast<double>(n) - 1e-9));

  AdjustmentParams params;
  params.mode = mode;
  params.alpha = alpha;
  const double floor_value = mode == AdjustmentMode::kShift ? 0.0 : 1.0;
  const double bound = mode == AdjustmentMode::kShift ? kMaxShift : kMaxScale;
  params.value = floor_value;
  if (need <= 0) return params;

  std::vector<double> req(predicted.size());
  for (size_t i = 0; i < req.size(); ++i) {
    req[i] = Requirement(predicted[i], truth[i], mode);
  }
  std::nth_element(req.begin(), req.begin() + (need - 1), req.end());
  double value = std::max(floor_value, req[static_cast<size_t>(need - 1)]);
  if (value > bound) {
    params.value = bound;
    params.saturated = true;
    return params;
  }
  params.value = value;
  while (CoveredCount(predicted, truth, params) < need) {
    params.value = std::nextafter(params.value, kInf);
    if (params.value > bound) {
      params.value = bound;
      params.saturated = true;
      return params;
    }
  }
  // The real-arithmetic requirement can overshoot once rounding in Apply is
  // accounted for. Coverage is monotone in the parameter and nonnegative
  // doubles order like their bit patterns, so bisect on the bits for the
  // smallest value that still covers.
  auto bits = [](double x) { return std::bit_cast<uint64_t>(x); };
  uint64_t lo = bits(floor_value), hi = bits(params.value);
  AdjustmentParams probe = params;
  probe.value = floor_value;
  if (CoveredCount(predicted, truth, probe) >= need) hi = lo;
  while (hi - lo > 1) {
    const uint64_t mid = lo + (hi - lo) / 2;
    probe.value = std::bit_cast<double>(mid);
    if (CoveredCount(predicted, truth, probe) >= need) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  params.value = std::bit_cast<double>(hi);
  return params;
}

LoocvResult LoocvAdjust(std::span<const EvaluationRecord> records,
                        Method method, double alpha, AdjustmentMode mode) {
  std::map<std::string, std::vector<const EvaluationRecord*>> groups;
  for (const auto& r : records) {
    if (r.Find(method)) groups[r.group].push_back(&r);
  }
  if (groups.size() < 2) {
    Fail(ErrorKind::kDomain, "LOOCV needs at least two groups carrying " +
                                 std::string(MethodName(method)));
  }
  LoocvResult result;
  result.method = method;
  result.mode = mode;
  result.alpha = alpha;
  for (const auto& [held_out, members] : groups) {
    std::vector<double> train_p, train_t;
    std::vector<std::string> trained_on;
    for (const auto& [name, other] : groups) {
      if (name == held_out) continue;
      trained_on.push_back(name);
      for (const auto* r : other) {
        train_p.push_back(r->Find(method)->predicted_error);
        train_t.push_back(r->true_target_error);
      }
    }
    LoocvFold fold;
    fold.held_out = held_out;
    fold.params = FitAdjustment(train_p, train_t, alpha, mode);
    fold.params.trained_on = std::move(trained_on);
    fold.training_coverage =
        static_cast<double>(CoveredCount(train_p, train_t, fold.params)) /
        static_cast<double>(train_p.size());
    for (const auto* r : members) {
      fold.adjusted.push_back(fold.params.Apply(r->Find(method)->predicted_error));
      fold.truth.push_back(r->true_target_error);
    }
    fold.held_out_coverage = Coverage(fold.adjusted, fold.truth);
    fold.held_out_mae = Mae(fold.adjusted, fold.truth);
    result.folds.push_back(std::move(fold));
  }
  return result;
}

}  // namespace dis2
