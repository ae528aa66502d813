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

#include "dis2/reduction.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "dis2/error.h"

namespace dis2 {

PcaBasis PcaBasis::Truncate(int64_t p) const {
  if (p < 1 || p > retained()) {
    Fail(ErrorKind::kDomain, "cannot keep " + std::to_string(p) + " of " +
                                 std::to_string(retained()) + " components");
  }
  PcaBasis out;
  out.mean = mean;
  out.components = components.topRows(p);
  out.explained_variance = explained_variance.head(p);
  return out;
}

Matrix PcaBasis::Project(const Matrix& x) const {
  if (x.cols() != input_dim()) {
    Fail(ErrorKind::kShape, "PCA basis expects " +
                                std::to_string(input_dim()) + " columns");
  }
  Matrix centered = x.rowwise() - mean.transpose();
  return centered * components.transpose();
}

Matrix PcaBasis::Reconstruct(const Matrix& z) const {
  Matrix x = z * components;
  x.rowwise() += mean.transpose();
  return x;
}

PcaBasis FitPca(const Matrix& x) {
  if (x.rows() < 2) Fail(ErrorKind::kDomain, "PCA needs at least 2 rows");
  RequireFinite(x, "PCA input");
  const Eigen::Index d = x.cols();
  PcaBasis basis;
  basis.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - basis.mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    Fail(ErrorKind::kDomain, "PCA eigendecomposition failed");
  }
  // Eigen sorts ascending.
  basis.components.resize(d, d);
  basis.explained_variance.resize(d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const Eigen::Index src = d - 1 - r;
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index top = 0;
    for (Eigen::Index j = 1; j < d; ++j) {
      if (std::abs(v(j)) > std::abs(v(top)) + 1e-12) top = j;
    }
    if (v(top) < 0.0) v = -v;
    basis.components.row(r) = v.transpose();
    basis.explained_variance(r) = std::max(0.0, solver.eigenvalues()(src));
  }
  return basis;
}

double CumulativeL1Ratio(std::span<const double> trajectory) {
  if (trajectory.empty()) {
    Fail(ErrorKind::kDomain, "validity score of an empty trajectory");
  }
  size_t peak = 0;
  for (size_t i = 1; i < trajectory.size(); ++i) {
    if (trajectory[i] > trajectory[peak]) peak = i;
  }
  double path = trajectory[0];
  for (size_t i = 1; i <= peak; ++i) {
    path += std::abs(trajectory[i] - trajectory[i - 1]);
  }
  if (path <= 0.0) return 1.0;  // all-zero prefix: nothing was traversed
  // A nondecreasing prefix telescopes to a_m exactly in real arithmetic;
  // pin that case so rounding in the sum cannot push it off 1.
  bool monotone = true;
  for (size_t i = 1; i <= peak; ++i) monotone &= trajectory[i] >= trajectory[i - 1];
  if (monotone) return 1.0;
  return std::min(trajectory[peak] / path, std::nextafter(1.0, 0.0));
}

SweepResult SweepPcs(const ShiftInputs& shift, std::span<const int> k_list,
                     std::span<const TrainConfig> grid, double delta,
                     std::optional<double> score_threshold) {
  if (k_list.empty()) Fail(ErrorKind::kDomain, "sweep needs at least one k");
  if (std::set<int>(k_list.begin(), k_list.end()).size() != k_list.size()) {
    Fail(ErrorKind::kDomain, "sweep k values must be distinct");
  }
  for (int k : k_list) {
    if (k < 1) Fail(ErrorKind::kDomain, "sweep k must be positive");
  }
  Matrix pooled(shift.source_train.n() + shift.target_train.n(),
                shift.source_train.d());
  pooled << shift.source_train.features, shift.target_train.features;
  const PcaBasis full = FitPca(pooled);
  const int64_t d = full.input_dim();

  SweepResult out;
  out.score_threshold = score_threshold;
  for (int k : k_list) {
    const int64_t p = std::max<int64_t>(1, d / k);
    const PcaBasis basis = full.Truncate(p);
    const Dis2Result r = EvaluateDis2(
        shift, InputSpace{InputSpaceKind::kTopPcs, p}, grid, delta, &basis);
    out.records.push_back({k, p, r.report, r.validity_score});
  }

  if (score_threshold) {
    out.logits_bound =
        EvaluateDis2(shift, InputSpace{InputSpaceKind::kLogits, 0}, grid, delta)
            .report;
    for (const auto& rec : out.records) {
      if (rec.validity_score >= *score_threshold &&
          (!out.selected_bound ||
           rec.bound.bound_with_delta < *out.selected_bound)) {
        out.selected_bound = rec.bound.bound_with_delta;
        out.selected_k = rec.k;
      }
    }
    if (!out.selected_bound) {
      out.selected_bound = out.logits_bound->bound_with_delta;
    }
  }
  return out;
}

}  // namespace dis2
