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

#include "dis2/classifier.h"

#include "dis2/error.h"
#include "dis2/softmax.h"

namespace dis2 {

Matrix LinearHead::Apply(const Matrix& x) const {
  if (x.cols() != weights.cols()) {
    Fail(ErrorKind::kShape, "linear head expects " +
                                std::to_string(weights.cols()) +
                                " inputs, got " + std::to_string(x.cols()));
  }
  Matrix z = x * weights.transpose();
  z.rowwise() += bias.transpose();
  return z;
}

ClassifierUnderTest ClassifierUnderTest::FromHead(LinearHead head) {
  if (head.bias.size() != head.weights.rows()) {
    Fail(ErrorKind::kShape, "linear head bias length differs from class count");
  }
  RequireFinite(head.weights, "linear head weights");
  ClassifierUnderTest c;
  c.impl_ = std::move(head);
  return c;
}

ClassifierUnderTest ClassifierUnderTest::FromLogits() {
  ClassifierUnderTest c;
  c.impl_ = PrecomputedLogits{};
  return c;
}

Matrix ClassifierUnderTest::Logits(const EmbeddingDataset& data) const {
  if (const auto* h = head()) {
    if (h->classes() != data.classes) {
      Fail(ErrorKind::kShape, "classifier has " + std::to_string(h->classes()) +
                                  " classes, " + data.domain_tag + " has " +
                                  std::to_string(data.classes));
    }
    return h->Apply(data.features);
  }
  if (!data.logits) {
    Fail(ErrorKind::kValidation,
         data.domain_tag + ": classifier reads precomputed logits but the "
                           "split has none");
  }
  return *data.logits;
}

Labels ClassifierUnderTest::Predict(const EmbeddingDataset& data) const {
  return ArgmaxRows(Logits(data));
}

LinearHead LoadLinearHead(const std::filesystem::path& weights_path,
                          const std::filesystem::path& bias_path) {
  LinearHead head;
  head.weights = ReadMatrix(weights_path);
  const Matrix bias = ReadMatrix(bias_path);
  if (bias.size() != head.weights.rows()) {
    Fail(ErrorKind::kShape, bias_path.string() + ": bias has " +
                                std::to_string(bias.size()) +
                                " entries for " +
                                std::to_string(head.weights.rows()) +
                                " classes");
  }
  head.bias = Eigen::Map<const Vector>(bias.data(), bias.size());
  return head;
}

void SaveLinearHead(const LinearHead& head,
                    const std::filesystem::path& weights_path,
                    const std::filesystem::path& bias_path) {
  WriteMatrix(weights_path, head.weights);
  WriteMatrix(bias_path, Matrix(head.bias.transpose()));
}

}  // namespace dis2
