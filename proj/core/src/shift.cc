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

#include "dis2/shift.h"

#include "dis2/error.h"
#include "dis2/reduction.h"
#include "dis2/seed.h"

namespace dis2 {

ShiftInputs LoadShift(const ShiftManifest& manifest,
                      const ClassifierUnderTest& classifier,
                      double holdout_fraction, uint64_t seed) {
  ShiftInputs shift;
  shift.id = manifest.name;
  shift.group = manifest.name;
  shift.classifier = classifier;
  shift.delta = manifest.delta;

  auto load_pair = [&](SplitRole train_role, SplitRole val_role,
                       EmbeddingDataset& train, EmbeddingDataset& val) {
    train = LoadSplit(manifest, train_role);
    if (manifest.Has(val_role)) {
      val = LoadSplit(manifest, val_role);
    } else {
      auto [t, v] = SplitHoldout(
          train, holdout_fraction,
          DeriveSeed(seed, std::string(SplitRoleName(val_role))));
      train = std::move(t);
      val = std::move(v);
      val.domain_tag = std::string(SplitRoleName(val_role));
    }
  };
  load_pair(SplitRole::kSourceTrain, SplitRole::kSourceVal, shift.source_train,
            shift.source_val);
  load_pair(SplitRole::kTargetTrain, SplitRole::kTargetVal, shift.target_train,
            shift.target_val);
  return shift;
}

Matrix Represent(const EmbeddingDataset& data, const InputSpace& space,
                 const ClassifierUnderTest& classifier, const PcaBasis* pca) {
  switch (space.kind) {
    case InputSpaceKind::kFeatures:
      return data.features;
    case InputSpaceKind::kLogits:
      return classifier.Logits(data);
    case InputSpaceKind::kTopPcs:
      if (!pca || pca->retained() != space.dim) {
        Fail(ErrorKind::kShape, "top_pcs input space needs a basis with " +
                                    std::to_string(space.dim) + " components");
      }
      return pca->Project(data.features);
  }
  return data.features;
}

CriticProblem MakeCriticProblem(const ShiftInputs& shift,
                                const InputSpace& space, const PcaBasis* pca) {
  const auto& c = shift.classifier;
  CriticProblem problem;
  problem.classes = shift.classes();
  problem.source_train = Represent(shift.source_train, space, c, pca);
  problem.target_train = Represent(shift.target_train, space, c, pca);
  problem.source_holdout = Represent(shift.source_val, space, c, pca);
  problem.target_holdout = Represent(shift.target_val, space, c, pca);
  problem.source_train_pseudo = c.Predict(shift.source_train);
  problem.target_train_pseudo = c.Predict(shift.target_train);
  problem.source_holdout_pseudo = c.Predict(shift.source_val);
  problem.target_holdout_pseudo = c.Predict(shift.target_val);
  problem.input_space = space;
  problem.input_space.dim = problem.source_train.cols();
  if (space.kind == InputSpaceKind::kFeatures && c.head() &&
      c.head()->input_dim() == problem.source_train.cols()) {
    problem.initial_head = *c.head();
  }
  return problem;
}

Dis2Result EvaluateDis2(const ShiftInputs& shift, const InputSpace& space,
                        std::span<const TrainConfig> grid, double delta,
                        const PcaBasis* pca) {
  if (!shift.source_val.labels) {
    Fail(ErrorKind::kValidation, shift.id + ": source_val needs labels");
  }
  const CriticProblem problem = MakeCriticProblem(shift, space, pca);
  Dis2Result out;
  out.space = problem.input_space;
  out.search = RunCriticSearch(problem, grid);
  const CriticFitResult& best = out.search.selected();
  out.report = Dis2BoundFromPredictions(
      *shift.source_val.labels, problem.source_holdout_pseudo,
      best.critic.Predict(problem.source_holdout),
      problem.target_holdout_pseudo,
      best.critic.Predict(problem.target_holdout), delta);
  out.validity_score = CumulativeL1Ratio(best.agreement_trajectory);
  return out;
}

}  // namespace dis2
