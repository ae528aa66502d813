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

// Gaussian-cluster shift generator and a reference linear probe.

#ifndef DIS2_SYNTH_H_
#define DIS2_SYNTH_H_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dis2/classifier.h"
#include "dis2/dataset.h"

namespace dis2 {

struct SynthConfig {
  int classes = 2;
  int64_t dim = 2;
  int64_t source_per_class = 500;
  // Target size before reweighting; class counts follow class_weights by
  // largest-remainder apportionment.
  int64_t target_total = 1000;
  // Pairwise distance between class means.
  double separation = 3.0;
  // Length of the mean shift added to every target point.
  double shift_scale = 0.0;
  // Direction of the mean shift; drawn uniformly from the sphere if unset.
  std::optional<Vector> shift_direction;
  // Target class proportions. Empty means uniform.
  std::vector<double> class_weights;
  // Rotation of target points, in radians, within a seeded random 2-plane.
  double rotation_angle = 0.0;
  double noise = 1.0;
  uint64_t seed = 0;

  void Validate() const;
};

// Class means (C x d). Scaled one-hot vectors when C <= d, random
// directions otherwise; any two means are `separation` apart when C <= d.
Matrix SyntheticClassMeans(const SynthConfig& config);

// Per-class target counts for the configured weights.
std::vector<int64_t> TargetClassCounts(const SynthConfig& config);

// Labels are the generating cluster. Rows are shuffled. Deterministic in
// config.seed.
std::pair<EmbeddingDataset, EmbeddingDataset> GenerateSyntheticShift(
    const SynthConfig& config);

struct ProbeConfig {
  int steps = 300;
  double learning_rate = 0.1;
  double l2 = 1e-4;
};

// Multinomial logistic regression fit by full-batch Adam from zero.
LinearHead FitLinearProbe(const EmbeddingDataset& data,
                          const ProbeConfig& config = {});

}  // namespace dis2

#endif  // DIS2_SYNTH_H_
