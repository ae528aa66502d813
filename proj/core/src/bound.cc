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

#include "dis2/bound.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dis2/error.h"

namespace dis2 {
namespace {

void CheckDomain(int64_t n_source, int64_t n_target, double delta) {
  if (n_source < 1 || n_target < 1) {
    Fail(ErrorKind::kDomain, "bound needs nonempty holdouts");
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    Fail(ErrorKind::kDomain, "delta must lie in (0, 1]");
  }
}

}  // namespace

double ConcentrationTerm(int64_t n_source, int64_t n_target, double delta) {
  CheckDomain(n_source, n_target, delta);
  const double ns = static_cast<double>(n_source);
  const double nt = static_cast<double>(n_target);
  return std::sqrt((ns + 4.0 * nt) * std::log(1.0 / delta) /
                   (2.0 * ns * nt));
}

BoundReport MakeBoundReport(double source_error, double discrepancy,
                            int64_t n_source, int64_t n_target, double delta) {
  BoundReport r;
  r.source_error = source_error;
  r.discrepancy = discrepancy;
  r.n_source = n_source;
  r.n_target = n_target;
  r.delta = delta;
  r.concentration = ConcentrationTerm(n_source, n_target, delta);
  r.bound_without_delta = source_error + discrepancy;
  r.bound_with_delta = source_error + discrepancy + r.concentration;
  return r;
}

BoundReport BoundReport::WithDelta(double new_delta) const {
  return MakeBoundReport(source_error, discrepancy, n_source, n_target,
                         new_delta);
}

BoundReport Dis2BoundFromPredictions(std::span<const int32_t> source_labels,
                                     std::span<const int32_t> hat_source,
                                     std::span<const int32_t> critic_source,
                                     std::span<const int32_t> hat_target,
                                     std::span<const int32_t> critic_target,
                                     double delta) {
  if (hat_source.empty() || hat_target.empty()) {
    Fail(ErrorKind::kDomain, "bound needs nonempty holdouts");
  }
  const double source_error = ErrorRate(hat_source, source_labels);
  const double discrepancy = DiscrepancyFromPredictions(
      hat_source, critic_source, hat_target, critic_target);
  return MakeBoundReport(source_error, discrepancy,
                         static_cast<int64_t>(hat_source.size()),
                         static_cast<int64_t>(hat_target.size()), delta);
}

BoundReport Dis2Bound(const ClassifierUnderTest& classifier,
                      const EmbeddingDataset& source_holdout,
                      const Matrix& source_critic_inputs,
                      const LinearCritic& critic,
                      const EmbeddingDataset& target_holdout,
                      const Matrix& target_critic_inputs, double delta) {
  if (!source_holdout.labels) {
    Fail(ErrorKind::kValidation, "bound needs a labeled source holdout");
  }
  if (source_holdout.n() == 0 || target_holdout.n() == 0) {
    Fail(ErrorKind::kDomain, "bound needs nonempty holdouts");
  }
  if (source_critic_inputs.rows() != source_holdout.n() ||
      target_critic_inputs.rows() != target_holdout.n()) {
    Fail(ErrorKind::kShape, "critic inputs do not align with holdouts");
  }
  const Labels hat_s = classifier.Predict(source_holdout);
  const Labels hat_t = classifier.Predict(target_holdout);
  return Dis2BoundFromPredictions(*source_holdout.labels, hat_s,
                                  critic.Predict(source_critic_inputs), hat_t,
                                  critic.Predict(target_critic_inputs), delta);
}

std::string_view CertificateName(Certificate c) {
  return c == Certificate::kProven ? "proven" : "inconclusive";
}

double CertificateMargin(int64_t n_source, int64_t n_target, double delta) {
  CheckDomain(n_source, n_target, delta);
  const double ns = static_cast<double>(n_source);
  const double nt = static_cast<double>(n_target);
  return std::sqrt(2.0 * (ns + nt) * std::log(1.0 / delta) / (ns * nt));
}

Certificate AssumptionCertificate(const BoundReport& report,
                                  double target_error_empirical) {
  const double margin =
      CertificateMargin(report.n_source, report.n_target, report.delta);
  return target_error_empirical <=
                 report.source_error + report.discrepancy - margin
             ? Certificate::kProven
             : Certificate::kInconclusive;
}

std::string RenderBound(const BoundReport& report) {
  const double shown = std::clamp(report.bound_with_delta, 0.0, 1.0);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "bound %.4f%s (src %.4f + disc %.4f + conc %.4f) "
                "w/o-delta %.4f delta=%g n_S=%lld n_T=%lld",
                shown, report.bound_with_delta > 1.0 ? " [vacuous]" : "",
                report.source_error, report.discrepancy, report.concentration,
                std::clamp(report.bound_without_delta, 0.0, 1.0), report.delta,
                static_cast<long long>(report.n_source),
                static_cast<long long>(report.n_target));
  return buf;
}

}  // namespace dis2
