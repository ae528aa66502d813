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

// Target-error upper bound from a selected critic.
//
// With probability at least 1 - delta over the holdout draws,
//
//   eps_T(yhat) <= eps_S(yhat) + Delta(yhat, h')
//                  + sqrt((n_S + 4 n_T) ln(1/delta) / (2 n_S n_T))
//
// provided the critic's population discrepancy is at least that of the true
// labeling function. The last term comes from Hoeffding's inequality applied
// to n_S source variables with range 2/n_S and n_T target variables with
// range 1/n_T. All logs are natural.

#ifndef DIS2_BOUND_H_
#define DIS2_BOUND_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "dis2/critic.h"
#include "dis2/dataset.h"

namespace dis2 {

struct BoundReport {
  double source_error = 0.0;  // on the labeled source holdout
  double discrepancy = 0.0;   // on the source/target holdouts
  int64_t n_source = 0;
  int64_t n_target = 0;
  double delta = 0.01;
  double concentration = 0.0;
  // Stored unclamped; may exceed 1 or drop below 0.
  double bound_with_delta = 0.0;
  double bound_without_delta = 0.0;

  // Same measurements, different confidence level.
  BoundReport WithDelta(double new_delta) const;
};

double ConcentrationTerm(int64_t n_source, int64_t n_target, double delta);

BoundReport MakeBoundReport(double source_error, double discrepancy,
                            int64_t n_source, int64_t n_target, double delta);

// `source_holdout` must be labeled. The critic's input representation of
// each holdout is passed separately because the classifier and the critic
// may read different spaces.
BoundReport Dis2Bound(const ClassifierUnderTest& classifier,
                      const EmbeddingDataset& source_holdout,
                      const Matrix& source_critic_inputs,
                      const LinearCritic& critic,
                      const EmbeddingDataset& target_holdout,
                      const Matrix& target_critic_inputs, double delta);

// Variant for callers that already hold predictions.
BoundReport Dis2BoundFromPredictions(std::span<const int32_t> source_labels,
                                     std::span<const int32_t> hat_source,
                                     std::span<const int32_t> critic_source,
                                     std::span<const int32_t> hat_target,
                                     std::span<const int32_t> critic_target,
                                     double delta);

enum class Certificate { kProven, kInconclusive };

std::string_view CertificateName(Certificate c);

// sqrt(2 (n_S + n_T) ln(1/delta) / (n_S n_T)).
double CertificateMargin(int64_t n_source, int64_t n_target, double delta);

// kProven iff empirical target error <= source_error + discrepancy - margin,
// i.e. the discrepancy assumption held unless a delta-probability event
// occurred. Needs labeled target data, so only the harness calls it.
Certificate AssumptionCertificate(const BoundReport& report,
                                  double target_error_empirical);

// "bound 0.2315 (src 0.0410 + disc 0.1140 + conc 0.0765) delta=0.01"; values
// are clamped to [0, 1] here only, with a vacuous marker when above 1.
std::string RenderBound(const BoundReport& report);

}  // namespace dis2

#endif  // DIS2_BOUND_H_
