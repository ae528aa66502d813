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

// Pointwise agreement and disagreement losses over a single logit vector,
// each with its analytic gradient with respect to the logits.
//
//   logistic   -log softmax(z)_y                      [/ log C if normalized]
//   dis        softplus(z_y - mean_{k != y} z_k) / log 2
//   dbat       softplus(z_y - logsumexp_{k != y} z_k)
//   neg_xent   log softmax(z)_y
//
// `dis` is convex in z and bounds 1{argmax z = y} from above, so minimizing
// it over target points pushes a critic away from the pseudo-label y. The
// other two disagreement losses exist for comparison only.

#ifndef DIS2_LOSSES_H_
#define DIS2_LOSSES_H_

#include <span>
#include <string_view>
#include <optional>
#include <vector>

namespace dis2 {

struct LossEval {
  double value = 0.0;
  std::vector<double> gradient;  // d value / d logits
};

enum class LossVariant { kDis, kDbat, kNegXent };

std::string_view LossVariantName(LossVariant v);
std::optional<LossVariant> ParseLossVariant(std::string_view name);

// log(1 + exp(z)) as max(z, 0) + log1p(exp(-|z|)).
double Softplus(double z);
double Sigmoid(double z);

// Kernel forms write the gradient into `grad` (size C) and return the value.
// They skip argument validation and are meant for inner loops.
double LogisticLossKernel(std::span<const double> logits, int y,
                          bool normalize, std::span<double> grad);
double DisagreementLossKernel(std::span<const double> logits, int y,
                              std::span<double> grad);
double DbatLossKernel(std::span<const double> logits, int y,
                      std::span<double> grad);
double NegXentLossKernel(std::span<const double> logits, int y,
                         std::span<double> grad);
double TargetLossKernel(LossVariant variant, std::span<const double> logits,
                        int y, std::span<double> grad);

// Validated forms: C >= 2, finite logits, y in [0, C).
LossEval LogisticLoss(std::span<const double> logits, int y, bool normalize);
LossEval DisagreementLoss(std::span<const double> logits, int y);
LossEval DbatLoss(std::span<const double> logits, int y);
LossEval NegXentLoss(std::span<const double> logits, int y);

}  // namespace dis2

#endif  // DIS2_LOSSES_H_
