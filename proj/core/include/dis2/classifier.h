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

#ifndef DIS2_CLASSIFIER_H_
#define DIS2_CLASSIFIER_H_

#include <filesystem>
#include <optional>
#include <variant>

#include "dis2/dataset.h"

namespace dis2 {

// Affine map x -> W x + b with W of shape C x p.
struct LinearHead {
  Matrix weights;
  Vector bias;

  int classes() const { return static_cast<int>(weights.rows()); }
  int64_t input_dim() const { return weights.cols(); }

  // n x C logits for an n x p input.
  Matrix Apply(const Matrix& x) const;
};

// The classifier whose target error is being bounded. Either a linear head
// over features, or a marker saying every split already carries its logits.
class ClassifierUnderTest {
 public:
  struct PrecomputedLogits {};

  static ClassifierUnderTest FromHead(LinearHead head);
  static ClassifierUnderTest FromLogits();

  bool has_head() const { return std::holds_alternative<LinearHead>(impl_); }
  const LinearHead* head() const { return std::get_if<LinearHead>(&impl_); }

  // n x C logits for `data`. Throws on dimension mismatch, or when
  // precomputed logits were promised but the split has none.
  Matrix Logits(const EmbeddingDataset& data) const;
  Labels Predict(const EmbeddingDataset& data) const;

 private:
  std::variant<LinearHead, PrecomputedLogits> impl_;
};

// Head files: weights in the matrix container (C x d) and the bias as a
// 1 x C matrix.
LinearHead LoadLinearHead(const std::filesystem::path& weights_path,
                          const std::filesystem::path& bias_path);
void SaveLinearHead(const LinearHead& head,
                    const std::filesystem::path& weights_path,
                    const std::filesystem::path& bias_path);

}  // namespace dis2

#endif  // DIS2_CLASSIFIER_H_
