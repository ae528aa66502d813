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

#ifndef DIS2_SOFTMAX_H_
#define DIS2_SOFTMAX_H_

#include <span>

#include "dis2/matrix_io.h"

namespace dis2 {

// Index of the largest entry; ties go to the lowest index.
int Argmax(std::span<const double> v);

// -log softmax(v)_y, computed without overflow and without losing the tail
// when v_y dominates (log1p of the remaining mass).
double NegLogSoftmax(std::span<const double> v, int y);

// Row-wise softmax using the log-sum-exp shift.
Matrix SoftmaxRows(const Matrix& logits);

Labels ArgmaxRows(const Matrix& logits);

// Per-row max softmax probability.
Vector MaxConfidence(const Matrix& logits);

// Per-row sum_k p_k log p_k (<= 0).
Vector NegativeEntropy(const Matrix& logits);

}  // namespace dis2

#endif  // DIS2_SOFTMAX_H_
