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

// End-to-end benchmark over a seeded synthetic suite or a manifest list.

#ifndef DIS2_SUITE_H_
#define DIS2_SUITE_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dis2/critic.h"
#include "dis2/loocv.h"
#include "dis2/metrics.h"
#include "dis2/shift.h"
#include "dis2/synth.h"

namespace dis2 {

std::vector<Method> AllMethods();

struct EvalOptions {
  std::vector<Method> methods = AllMethods();
  double delta = kDefaultDelta;
  InputSpaceKind space = InputSpaceKind::kFeatures;
  // For top_pcs: keep max(1, d / pc_divisor) components.
  int pc_divisor = 1;
  std::vector<TrainConfig> grid = DefaultSearchGrid();
  uint64_t seed = 0;  // COT subsampling
};

// Runs the requested methods on one shift. Truth is the classifier's error
// on target_test when present, otherwise on the labeled target_val.
EvaluationRecord EvaluateShift(const ShiftInputs& shift,
                               const EvalOptions& options);

// C=4, d=8, 1000 source points per class, separation 3, unit noise.
SynthConfig DefaultSuiteGeometry();

struct SynthSuiteConfig {
  uint64_t seed = 0;
  int shifts = 200;
  int groups = 5;
  // Geometry shared by all shifts; per-shift seed, shift, rotation and
  // class weights are drawn from the ranges below.
  SynthConfig base = DefaultSuiteGeometry();
  int64_t target_pool = 4000;   // split into target_train / target_val
  int64_t target_test = 8000;   // labeled truth sample
  double max_shift_scale = 2.5;
  double max_rotation = 0.6;
  double dirichlet_alpha = 5.0;  // target class weights
  double holdout_fraction = 0.5;
  ProbeConfig probe;
};

// Shift `index` of the suite, with its linear probe as classifier.
ShiftInputs MakeSuiteShift(const SynthSuiteConfig& config, int index);

struct ShiftFailure {
  std::string shift_id;
  std::string kind;
  std::string message;
};

struct SuiteResult {
  std::vector<EvaluationRecord> records;  // sorted by shift id
  std::vector<ShiftFailure> failures;     // sorted by shift id
  MetricsSummary summary;
};

// Shifts are evaluated on `threads` workers (0 = hardware concurrency).
// Results do not depend on the thread count.
SuiteResult RunSynthSuite(const SynthSuiteConfig& config,
                          const EvalOptions& options, int threads = 1);

struct ManifestSuiteConfig {
  std::vector<std::filesystem::path> manifests;
  ClassifierUnderTest classifier = ClassifierUnderTest::FromLogits();
  double holdout_fraction = 0.2;
  uint64_t seed = 0;
};

SuiteResult RunManifestSuite(const ManifestSuiteConfig& config,
                             const EvalOptions& options, int threads = 1);

// Writes records.jsonl and summary.json into `dir`, creating it.
void WriteSuiteOutputs(const SuiteResult& result,
                       const std::filesystem::path& dir);

}  // namespace dis2

#endif  // DIS2_SUITE_H_
