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

#include "dis2/dataset.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dis2/error.h"

namespace dis2 {

void EmbeddingDataset::Validate() const {
  const std::string tag = domain_tag.empty() ? "dataset" : domain_tag;
  RequireFinite(features, tag + " features");
  if (labels) {
    if (static_cast<int64_t>(labels->size()) != n()) {
      Fail(ErrorKind::kShape, tag + ": " + std::to_string(labels->size()) +
                                  " labels for " + std::to_string(n()) +
                                  " rows");
    }
    for (size_t i = 0; i < labels->size(); ++i) {
      const int32_t y = (*labels)[i];
      if (y < 0 || y >= classes) {
        Fail(ErrorKind::kValidation, tag + ": label " + std::to_string(y) +
                                         " at row " + std::to_string(i) +
                                         " outside [0, " +
                                         std::to_string(classes) + ")");
      }
    }
  }
  if (logits) {
    if (logits->rows() != n() || logits->cols() != classes) {
      Fail(ErrorKind::kShape,
           tag + ": logits are " + std::to_string(logits->rows()) + "x" +
               std::to_string(logits->cols()) + ", expected " +
               std::to_string(n()) + "x" + std::to_string(classes));
    }
    RequireFinite(*logits, tag + " logits");
  }
}

EmbeddingDataset Subset(const EmbeddingDataset& data,
                        std::span<const int64_t> indices) {
  EmbeddingDataset out;
  out.domain_tag = data.domain_tag;
  out.classes = data.classes;
  const auto count = static_cast<Eigen::Index>(indices.size());
  out.features.resize(count, data.d());
  if (data.labels) out.labels.emplace(indices.size());
  if (data.logits) out.logits.emplace(count, data.logits->cols());
  for (Eigen::Index r = 0; r < count; ++r) {
    const int64_t src = indices[static_cast<size_t>(r)];
    if (src < 0 || src >= data.n()) {
      Fail(ErrorKind::kDomain, "subset index " + std::to_string(src) +
                                   " out of range");
    }
    out.features.row(r) = data.features.row(src);
    if (data.labels) (*out.labels)[static_cast<size_t>(r)] = (*data.labels)[src];
    if (data.logits) out.logits->row(r) = data.logits->row(src);
  }
  return out;
}

std::pair<EmbeddingDataset, EmbeddingDataset> SplitHoldout(
    const EmbeddingDataset& data, double fraction, uint64_t seed) {
  const int64_t n = data.n();
  if (n < 2) {
    Fail(ErrorKind::kDomain, "split_holdout needs at least 2 rows, got " +
                                 std::to_string(n));
  }
  if (!(fraction > 0.0 && fraction < 1.0)) {
    Fail(ErrorKind::kDomain, "holdout fraction must lie in (0, 1)");
  }
  const auto holdout_size = std::clamp<int64_t>(
      std::llround(fraction * static_cast<double>(n)), 1, n - 1);

  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int64_t> train(order.begin(), order.end() - holdout_size);
  std::vector<int64_t> holdout(order.end() - holdout_size, order.end());
  // Keep original row order within each side.
  std::sort(train.begin(), train.end());
  std::sort(holdout.begin(), holdout.end());
  return {Subset(data, train), Subset(data, holdout)};
}

double ErrorRate(std::span<const int32_t> predictions,
                 std::span<const int32_t> labels) {
  if (predictions.size() != labels.size()) {
    Fail(ErrorKind::kShape, "error rate: prediction/label length mismatch");
  }
  if (labels.empty()) Fail(ErrorKind::kDomain, "error rate of empty split");
  size_t wrong = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    wrong += predictions[i] != labels[i];
  }
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

}  // namespace dis2
