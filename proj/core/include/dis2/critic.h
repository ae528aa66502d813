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

// Linear critics that maximize disagreement discrepancy against a fixed
// classifier.
//
// A critic h' is trained to agree with the classifier's predictions on source
// samples and to disagree with them on target samples, by minimizing
//
//   mean_{x in S} logistic(h'(x), yhat(x)) + mean_{x in T} dis(h'(x), yhat(x))
//
// with minibatch SGD or Adam. Only the classifier's predictions yhat are
// consumed; CriticProblem has no slot for ground-truth labels. Several
// configurations are trained and the one with the largest discrepancy on a
// disjoint holdout is kept.

#ifndef DIS2_CRITIC_H_
#define DIS2_CRITIC_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dis2/classifier.h"
#include "dis2/losses.h"

namespace dis2 {

enum class InputSpaceKind { kFeatures, kLogits, kTopPcs };

struct InputSpace {
  InputSpaceKind kind = InputSpaceKind::kFeatures;
  int64_t dim = 0;  // p

  std::string ToString() const;  // "features", "logits", "top_pcs(p)"
  static std::optional<InputSpace> Parse(std::string_view text);
  friend bool operator==(const InputSpace&, const InputSpace&) = default;
};

struct LinearCritic {
  LinearHead head;  // C x p
  InputSpace input_space;

  Labels Predict(const Matrix& x) const;
};

enum class Optimizer { kSgdMomentum, kAdam };

std::string_view OptimizerName(Optimizer o);
std::optional<Optimizer> ParseOptimizer(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-2;
  int epochs = 50;
  int batch_size = 256;
  double weight_decay = 0.0;
  uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kSgdMomentum;
  LossVariant loss_variant = LossVariant::kDis;
  // Divide the source cross-entropy by log C. Off by default: the unscaled
  // loss reaches higher discrepancy in practice.
  bool normalize_source_loss = false;
  double momentum = 0.9;

  void Validate() const;
};

// Everything a critic run may look at. Inputs are already mapped into the
// critic's input space; the *_pseudo vectors hold the classifier's argmax
// predictions on the corresponding rows.
struct CriticProblem {
  int classes = 0;
  InputSpace input_space;
  Matrix source_train;
  Labels source_train_pseudo;
  Matrix target_train;
  Labels target_train_pseudo;
  Matrix source_holdout;
  Labels source_holdout_pseudo;
  Matrix target_holdout;
  Labels target_holdout_pseudo;
  // Starting point when it lives in the same space; zero init otherwise.
  std::optional<LinearHead> initial_head;

  void Validate() const;
};

struct CriticFitResult {
  LinearCritic critic;
  // Per-epoch source agreement 1 - eps_S(yhat, h'_i) on the training split.
  std::vector<double> agreement_trajectory;
  // Per-epoch full-pass training objective and training-split discrepancy.
  std::vector<double> objective_trajectory;
  std::vector<double> train_discrepancy_trajectory;
  double holdout_discrepancy = 0.0;
  TrainConfig config;
};

// eps_T(yhat, h') - eps_S(yhat, h') from prediction vectors.
double DiscrepancyFromPredictions(std::span<const int32_t> hat_source,
                                  std::span<const int32_t> critic_source,
                                  std::span<const int32_t> hat_target,
                                  std::span<const int32_t> critic_target);

double EmpiricalDiscrepancy(const LinearCritic& critic,
                            std::span<const int32_t> hat_source,
                            std::span<const int32_t> hat_target,
                            const Matrix& source, const Matrix& target);

// Deterministic given config.seed. Throws kDivergence naming the epoch if the
// minibatch objective stops being finite.
CriticFitResult TrainCritic(const CriticProblem& problem,
                            const TrainConfig& config);

// Index of the largest holdout discrepancy; ties go to the lowest index.
size_t SelectBestCriticIndex(std::span<const CriticFitResult> results);
const CriticFitResult& SelectBestCritic(
    std::span<const CriticFitResult> results);

// learning rate {1e-1, 1e-2, 1e-3} x seed {0, 1, 2} x {sgd(0.9), adam},
// 50 epochs, batch 256, no weight decay.
std::vector<TrainConfig> DefaultSearchGrid(
    LossVariant variant = LossVariant::kDis);

struct CriticSearchResult {
  std::vector<CriticFitResult> runs;
  size_t best = 0;

  const CriticFitResult& selected() const { return runs.at(best); }
};

CriticSearchResult RunCriticSearch(const CriticProblem& problem,
                                   std::span<const TrainConfig> grid);

// Checkpoint = <prefix>.weights (C x p) and <prefix>.bias (1 x C) in the
// matrix container, plus <prefix>.json with the input space and config.
void SaveCritic(const CriticFitResult& result,
                const std::filesystem::path& prefix);
LinearCritic LoadCritic(const std::filesystem::path& prefix);

}  // namespace dis2

#endif  // DIS2_CRITIC_H_
