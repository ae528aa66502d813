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

// Exact solvers for the two transport problems behind the COT estimator.

#ifndef DIS2_ASSIGNMENT_H_
#define DIS2_ASSIGNMENT_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dis2/matrix_io.h"

namespace dis2 {

struct AssignmentResult {
  std::vector<int> column_of_row;
  double cost = 0.0;
};

// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
// row/column potentials, O(n^3)).
AssignmentResult SolveAssignment(const Matrix& cost);

struct TransportResult {
  // flow(i, k) in the same integer units as the masses.
  std::vector<std::vector<int64_t>> flow;
  double cost = 0.0;  // sum_ik flow(i, k) * cost(i, k)
};

// Balanced transportation problem from n sources to K sinks with integer
// masses, solved exactly by successive shortest paths. Residual paths only
// revisit sinks, so each shortest-path step is a Bellman-Ford pass over the K
// sink nodes, with sink-to-sink arc weights min_j cost(j, k) - cost(j, c)
// kept in ordered sets over the sources j currently shipping to c. Suited to
// K much smaller than n.
TransportResult SolveTransport(const Matrix& cost,
                               std::span<const int64_t> source_mass,
                               std::span<const int64_t> sink_mass);

}  // namespace dis2

#endif  // DIS2_ASSIGNMENT_H_
