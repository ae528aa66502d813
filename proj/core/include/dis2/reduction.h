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

// Feature-space reduction and the optimization-trajectory validity score.

#ifndef DIS2_REDUCTION_H_
#define DIS2_REDUCTION_H_

#include <optional>
#include <span>
#include <vector>

#include "dis2/bound.h"
#include "dis2/shift.h"

namespace dis2 {

// Rows of `components` are orthonormal principal directions sorted by
// descending variance. Each row's largest-magnitude entry is positive.
struct PcaBasis {
  Vector mean;
  Matrix components;  // p x d
  Vector explained_variance;

  int64_t retained() const { return components.rows(); }
  int64_t input_dim() const { return components.cols(); }

  PcaBasis Truncate(int64_t p) const;
  Matrix Project(const Matrix& x) const;       // (x - mean) V^T, n x p
  Matrix Reconstruct(const Matrix& z) const;   // z V + mean, n x d
};

// Eigendecomposition of the sample covariance of mean-centered `x` (n >= 2).
// Zero-variance directions come last.
PcaBasis FitPca(const Matrix& x);

// a_m / (a_1 + sum_{i=2..m} |a_i - a_{i-1}|) with m the first argmax.
// Equals 1 exactly when the trajectory never decreases before its peak.
double CumulativeL1Ratio(std::span<const double> trajectory);

inline const std::vector<int> kDefaultPcDivisors = {1, 4, 16, 32, 64, 128};

struct SweepRecord {
  int k = 1;
  int64_t p = 0;  // max(1, d / k)
  BoundReport bound;
  double validity_score = 0.0;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::optional<BoundReport> logits_bound;
  std::optional<double> score_threshold;
  // Chosen prediction when a threshold is set: the smallest bound among
  // records scoring at least the threshold, else the logits bound.
  std::optional<double> selected_bound;
  std::optional<int> selected_k;  // unset when falling back to logits
};

// Runs the critic search on the top d/k principal components for each k.
// The basis is fit on source_train and target_train features together.
SweepResult SweepPcs(const ShiftInputs& shift, std::span<const int> k_list,
                     std::span<const TrainConfig> grid, double delta,
                     std::optional<double> score_threshold = std::nullopt);

}  // namespace dis2

#endif  // DIS2_REDUCTION_H_
