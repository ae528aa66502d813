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

#include "dis2/softmax.h"

#include <cmath>

#include "dis2/error.h"

namespace dis2 {

int Argmax(std::span<const double> v) {
  int best = 0;
  for (size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[static_cast<size_t>(best)]) best = static_cast<int>(k);
  }
  return best;
}

double NegLogSoftmax(std::span<const double> v, int y) {
  const int top = Argmax(v);
  const double top_value = v[static_cast<size_t>(top)];
  double rest = 0.0;
  for (size_t k = 0; k < v.size(); ++k) {
    if (static_cast<int>(k) != top) rest += std::exp(v[k] - top_value);
  }
  // log sum_k exp(v_k) - v_y = (top - v_y) + log1p(rest)
  return (top_value - v[static_cast<size_t>(y)]) + std::log1p(rest);
}

Matrix SoftmaxRows(const Matrix& logits) {
  RequireFinite(logits, "softmax input");
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    out.row(i) = (logits.row(i).array() - top).exp();
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

Labels ArgmaxRows(const Matrix& logits) {
  Labels out(static_cast<size_t>(logits.rows()));
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    out[static_cast<size_t>(i)] =
        Argmax({logits.row(i).data(), static_cast<size_t>(logits.cols())});
  }
  return out;
}

Vector MaxConfidence(const Matrix& logits) {
  return SoftmaxRows(logits).rowwise().maxCoeff();
}

Vector NegativeEntropy(const Matrix& logits) {
  const Matrix p = SoftmaxRows(logits);
  Vector out(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < p.cols(); ++k) {
      if (p(i, k) > 0.0) s += p(i, k) * std::log(p(i, k));
    }
    out(i) = s;
  }
  return out;
}

}  // namespace dis2
