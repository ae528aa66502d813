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

#ifndef DIS2_DATASET_H_
#define DIS2_DATASET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dis2/matrix_io.h"

namespace dis2 {

// One domain split: an n x d feature matrix with optional labels and logits.
// Treated as immutable once validated.
struct EmbeddingDataset {
  Matrix features;
  std::optional<Labels> labels;
  std::optional<Matrix> logits;
  std::string domain_tag;
  int classes = 0;

  int64_t n() const { return features.rows(); }
  int64_t d() const { return features.cols(); }
  bool has_labels() const { return labels.has_value(); }

  // Throws if any invariant fails: labels outside [0, classes), non-finite
  // features or logits, row-count disagreement, or logits without exactly
  // `classes` columns.
  void Validate() const;
};

// Rows `indices` of `data`, keeping labels and logits aligned.
EmbeddingDataset Subset(const EmbeddingDataset& data,
                        std::span<const int64_t> indices);

// Random disjoint partition. The holdout gets round(fraction * n) rows,
// clamped so both sides keep at least one row. Deterministic in `seed`.
std::pair<EmbeddingDataset, EmbeddingDataset> SplitHoldout(
    const EmbeddingDataset& data, double fraction, uint64_t seed);

// Fraction of rows where predictions differ from the labels.
double ErrorRate(std::span<const int32_t> predictions,
                 std::span<const int32_t> labels);

}  // namespace dis2

#endif  // DIS2_DATASET_H_
