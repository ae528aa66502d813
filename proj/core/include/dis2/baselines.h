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

// Confidence-based target error estimators, plus temperature scaling.
//
// Every estimator takes raw logits and a TemperatureScaler; pass
// TemperatureScaler{} (T = 1) to work on raw logits.

#ifndef DIS2_BASELINES_H_
#define DIS2_BASELINES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dis2/matrix_io.h"

namespace dis2 {

struct TemperatureScaler {
  double temperature = 1.0;

  Matrix Apply(const Matrix& logits) const { return logits / temperature; }
};

inline constexpr double kMinTemperature = 0.01;
inline constexpr double kMaxTemperature = 100.0;

// Mean cross-entropy of logits / T.
double ScaledNll(const Matrix& logits, const Labels& labels, double t);

// Minimizes ScaledNll over T in [0.01, 100] by golden-section search on log T
// (the objective is convex in 1/T, hence unimodal in log T); the bracket ends
// are compared explicitly so a monotone objective returns the boundary.
TemperatureScaler FitTemperature(const Matrix& val_logits,
                                 const Labels& val_labels);

enum class Method { kAc, kDoc, kAtcNe, kAtcMc, kCot, kDis2, kDis2NoDelta };

std::string_view MethodName(Method m);
std::optional<Method> ParseMethod(std::string_view name);

struct ErrorEstimate {
  Method method = Method::kAc;
  double predicted_error = 0.0;
  // "threshold" for ATC, "cost" and "exact" for COT, bound terms for DIS2.
  std::map<std::string, double> metadata;
};

// 1 - mean max-softmax confidence.
ErrorEstimate AcEstimate(const Matrix& target_logits,
                         const TemperatureScaler& scaler);

// source error + (mean source confidence - mean target confidence).
// Unclamped; may be negative.
ErrorEstimate DocEstimate(const Matrix& source_val_logits,
                          const Labels& source_val_labels,
                          const Matrix& target_logits,
                          const TemperatureScaler& scaler);

enum class AtcScore { kNegEntropy, kMaxConfidence };

// Threshold t = k-th smallest source score, k = number of source mistakes
// (t = -inf when k = 0). Prediction = fraction of target scores strictly
// below t.
ErrorEstimate AtcEstimate(const Matrix& source_val_logits,
                          const Labels& source_val_labels,
                          const Matrix& target_logits, AtcScore score,
                          const TemperatureScaler& scaler);

enum class CotSolver { kExact, kSubsampledAssignment };

// n * m limit above which the exact solver refuses.
inline constexpr int64_t kCotExactLimit = 4'000'000;
inline constexpr int64_t kCotSubsampleSize = 1024;

// Half the optimal transport cost between target softmax rows and one-hot
// source labels, both with uniform marginals, under the Euclidean ground
// cost. kExact solves the transport problem directly (n * m <= limit).
// kSubsampledAssignment draws min(1024, n, m) points from each side
// uniformly without replacement (seeded) and solves the assignment.
ErrorEstimate CotEstimate(const Labels& source_val_labels,
                          const Matrix& target_logits,
                          const TemperatureScaler& scaler, CotSolver solver,
                          uint64_t seed = 0);

// kExact when the size limit allows it, otherwise the subsampled path.
CotSolver DefaultCotSolver(int64_t n_target, int64_t n_source);

}  // namespace dis2

#endif  // DIS2_BASELINES_H_
