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

#ifndef DIS2_SHIFT_H_
#define DIS2_SHIFT_H_

#include <optional>
#include <span>
#include <string>

#include "dis2/bound.h"
#include "dis2/classifier.h"
#include "dis2/critic.h"
#include "dis2/manifest.h"

namespace dis2 {

struct PcaBasis;

// One source/target pair with the classifier under test. source_val must be
// labeled. Target labels, when present, are read only by the harness.
struct ShiftInputs {
  std::string id;
  std::string group;
  ClassifierUnderTest classifier = ClassifierUnderTest::FromLogits();
  EmbeddingDataset source_train;
  EmbeddingDataset source_val;
  EmbeddingDataset target_train;
  EmbeddingDataset target_val;
  // Large labeled target sample standing in for the population error.
  std::optional<EmbeddingDataset> target_test;
  double delta = kDefaultDelta;

  int classes() const { return source_train.classes; }
};

// Loads all four roles from a manifest. Missing source_val/target_val are
// carved out of the corresponding train split with `holdout_fraction`.
ShiftInputs LoadShift(const ShiftManifest& manifest,
                      const ClassifierUnderTest& classifier,
                      double holdout_fraction, uint64_t seed);

// Maps a split into a critic input space. top_pcs needs a basis whose
// retained count equals space.dim.
Matrix Represent(const EmbeddingDataset& data, const InputSpace& space,
                 const ClassifierUnderTest& classifier,
                 const PcaBasis* pca = nullptr);

CriticProblem MakeCriticProblem(const ShiftInputs& shift,
                                const InputSpace& space,
                                const PcaBasis* pca = nullptr);

struct Dis2Result {
  CriticSearchResult search;
  BoundReport report;
  InputSpace space;
  double validity_score = 1.0;  // cumulative l1 ratio of the selected run
};

// Critic search on the train splits, selection and bound on the holdouts.
Dis2Result EvaluateDis2(const ShiftInputs& shift, const InputSpace& space,
                        std::span<const TrainConfig> grid, double delta,
                        const PcaBasis* pca = nullptr);

}  // namespace dis2

#endif  // DIS2_SHIFT_H_
