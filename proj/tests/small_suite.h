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

#ifndef DIS2_TESTS_SMALL_SUITE_H_
#define DIS2_TESTS_SMALL_SUITE_H_

#include <vector>

#include "dis2/critic.h"
#include "dis2/suite.h"

namespace dis2::testing {

// A scaled-down synthetic suite so end-to-end tests run in seconds.
inline SynthSuiteConfig SmallSuite(uint64_t seed, int shifts) {
  SynthSuiteConfig c;
  c.seed = seed;
  c.shifts = shifts;
  c.base.source_per_class = 250;
  c.target_pool = 1000;
  c.target_test = 4000;
  return c;
}

// Six configurations, 15 epochs each.
inline std::vector<TrainConfig> SmallGrid() {
  std::vector<TrainConfig> grid;
  for (const TrainConfig& c : DefaultSearchGrid()) {
    if (c.seed != 0) continue;
    TrainConfig copy = c;
    copy.epochs = 15;
    grid.push_back(copy);
  }
  return grid;
}

}  // namespace dis2::testing

#endif  // DIS2_TESTS_SMALL_SUITE_H_
