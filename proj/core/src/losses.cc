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

#include "dis2/losses.h"

#include <cmath>
#include <numbers>

#include "dis2/error.h"
#include "dis2/softmax.h"

namespace dis2 {
namespace {

void Validate(std::span<const double> logits, int y, std::string_view loss) {
  if (logits.size() < 2) {
    Fail(ErrorKind::kDomain, std::string(loss) + " needs at least 2 classes");
  }
  if (y < 0 || static_cast<size_t>(y) >= logits.size()) {
    Fail(ErrorKind::kValidation, std::string(loss) + ": invalid class id " +
                                     std::to_string(y));
  }
  for (double z : logits) {
    if (!std::isfinite(z)) {
      Fail(ErrorKind::kValidation, std::string(loss) + ": non-finite logit");
    }
  }
}

// Fills grad with softmax(logits).
void SoftmaxInto(std::span<const double> logits, std::span<double> out) {
  double top = logits[0];
  for (double z : logits) top = std::max(top, z);
  double total = 0.0;
  for (size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - top);
    total += out[k];
  }
  for (double& p : out) p /= total;
}

template <typename Kernel>
LossEval Evaluate(std::span<const double> logits, Kernel kernel) {
  LossEval eval;
  eval.gradient.assign(logits.size(), 0.0);
  eval.value = kernel(std::span<double>(eval.gradient));
  return eval;
}

}  // namespace

std::string_view LossVariantName(LossVariant v) {
  switch (v) {
    case LossVariant::kDis:
      return "dis";
    case LossVariant::kDbat:
      return "dbat";
    case LossVariant::kNegXent:
      return "neg_xent";
  }
  return "unknown";
}

std::optional<LossVariant> ParseLossVariant(std::string_view name) {
  for (auto v : {LossVariant::kDis, LossVariant::kDbat, LossVariant::kNegXent}) {
    if (LossVariantName(v) == name) return v;
  }
  return std::nullopt;
}

double Softplus(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticLossKernel(std::span<const double> logits, int y,
                          bool normalize, std::span<double> grad) {
  const double scale =
      normalize ? 1.0 / std::log(static_cast<double>(logits.size())) : 1.0;
  SoftmaxInto(logits, grad);
  grad[static_cast<size_t>(y)] -= 1.0;
  for (double& g : grad) g *= scale;
  return scale * NegLogSoftmax(logits, y);
}

double DisagreementLossKernel(std::span<const double> logits, int y,
                              std::span<double> grad) {
  const size_t c = logits.size();
  const auto yi = static_cast<size_t>(y);
  double others = 0.0;
  for (size_t k = 0; k < c; ++k) {
    if (k != yi) others += logits[k];
  }
  const double inv_rest = 1.0 / static_cast<double>(c - 1);
  const double margin = logits[yi] - others * inv_rest;
  const double s = Sigmoid(margin) / std::numbers::ln2;
  for (size_t k = 0; k < c; ++k) grad[k] = k == yi ? s : -s * inv_rest;
  return Softplus(margin) / std::numbers::ln2;
}

double DbatLossKernel(std::span<const double> logits, int y,
                      std::span<double> grad) {
  const size_t c = logits.size();
  const auto yi = static_cast<size_t>(y);
  double top = -INFINITY;
  for (size_t k = 0; k < c; ++k) {
    if (k != yi) top = std::max(top, logits[k]);
  }
  double mass = 0.0;
  for (size_t k = 0; k < c; ++k) {
    grad[k] = k == yi ? 0.0 : std::exp(logits[k] - top);
    mass += grad[k];
  }
  const double margin = logits[yi] - (top + std::log(mass));
  const double s = Sigmoid(margin);
  for (size_t k = 0; k < c; ++k) {
    grad[k] = k == yi ? s : -s * grad[k] / mass;
  }
  return Softplus(margin);
}

double NegXentLossKernel(std::span<const double> logits, int y,
                         std::span<double> grad) {
  SoftmaxInto(logits, grad);
  for (double& g : grad) g = -g;
  grad[static_cast<size_t>(y)] += 1.0;
  return -NegLogSoftmax(logits, y);
}

double TargetLossKernel(LossVariant variant, std::span<const double> logits,
                        int y, std::span<double> grad) {
  switch (variant) {
    case LossVariant::kDis:
      return DisagreementLossKernel(logits, y, grad);
    case LossVariant::kDbat:
      return DbatLossKernel(logits, y, grad);
    case LossVariant::kNegXent:
      return NegXentLossKernel(logits, y, grad);
  }
  return 0.0;
}

LossEval LogisticLoss(std::span<const double> logits, int y, bool normalize) {
  Validate(logits, y, "logistic_loss");
  return Evaluate(logits, [&](std::span<double> g) {
    return LogisticLossKernel(logits, y, normalize, g);
  });
}

LossEval DisagreementLoss(std::span<const double> logits, int y) {
  Validate(logits, y, "disagreement_loss");
  return Evaluate(logits, [&](std::span<double> g) {
    return DisagreementLossKernel(logits, y, g);
  });
}

LossEval DbatLoss(std::span<const double> logits, int y) {
  Validate(logits, y, "dbat_loss");
  return Evaluate(
      logits, [&](std::span<double> g) { return DbatLossKernel(logits, y, g); });
}

LossEval NegXentLoss(std::span<const double> logits, int y) {
  Validate(logits, y, "neg_xent_loss");
  return Evaluate(logits, [&](std::span<double> g) {
    return NegXentLossKernel(logits, y, g);
  });
}

}  // namespace dis2
