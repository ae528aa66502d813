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

// Leave-one-group-out strengthening of error estimates.

#ifndef DIS2_LOOCV_H_
#define DIS2_LOOCV_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dis2/metrics.h"

namespace dis2 {

enum class AdjustmentMode { kShift, kScale };

std::string_view AdjustmentModeName(AdjustmentMode m);
std::optional<AdjustmentMode> ParseAdjustmentMode(std::string_view name);

// Search bounds for the adjustment parameter.
inline constexpr double kMaxShift = 2.0;
inline constexpr double kMaxScale = 1e3;

struct AdjustmentParams {
  AdjustmentMode mode = AdjustmentMode::kShift;
  double value = 0.0;  // b for shift, a >= 1 for scale
  double alpha = 0.95;
  std::vector<std::string> trained_on;
  // Set when alpha is not reachable inside the search bound; value is then
  // the bound itself.
  bool saturated = false;

  // predicted + b, or min(1, a * predicted).
  double Apply(double predicted) const;
};

// Smallest double giving coverage >= alpha on (predicted, truth), with
// ceil(alpha * n) records required. Starts from the matching order statistic
// of the per-record requirements and corrects for rounding in Apply.
AdjustmentParams FitAdjustment(std::span<const double> predicted,
                               std::span<const double> truth, double alpha,
                               AdjustmentMode mode);

struct LoocvFold {
  std::string held_out;
  AdjustmentParams params;
  double training_coverage = 0.0;  // after adjustment
  std::vector<double> adjusted;    // held-out predictions, record order
  std::vector<double> truth;
  double held_out_coverage = 0.0;
  double held_out_mae = 0.0;
};

struct LoocvResult {
  Method method = Method::kAc;
  AdjustmentMode mode = AdjustmentMode::kShift;
  double alpha = 0.95;
  std::vector<LoocvFold> folds;  // sorted by group name
};

// Requires at least two distinct groups among records carrying `method`.
LoocvResult LoocvAdjust(std::span<const EvaluationRecord> records,
                        Method method, double alpha, AdjustmentMode mode);

}  // namespace dis2

#endif  // DIS2_LOOCV_H_
