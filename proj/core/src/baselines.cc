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

#include "dis2/baselines.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "dis2/assignment.h"
#include "dis2/dataset.h"
#include "dis2/error.h"
#include "dis2/softmax.h"

namespace dis2 {
namespace {

void RequireLabeled(const Matrix& logits, const Labels& labels,
                    const char* what) {
  if (logits.rows() == 0) Fail(ErrorKind::kDomain, std::string(what) + " is empty");
  if (static_cast<int64_t>(labels.size()) != logits.rows()) {
    Fail(ErrorKind::kShape, std::string(what) + ": label count mismatch");
  }
  for (int32_t y : labels) {
    if (y < 0 || y >= logits.cols()) {
      Fail(ErrorKind::kValidation, std::string(what) + ": invalid label " +
                                       std::to_string(y));
    }
  }
}

void RequireNonempty(const Matrix& logits, const char* what) {
  if (logits.rows() == 0) Fail(ErrorKind::kDomain, std::string(what) + " is empty");
}

Vector Scores(const Matrix& logits, AtcScore score) {
  return score == AtcScore::kNegEntropy ? NegativeEntropy(logits)
                                        : MaxConfidence(logits);
}

int64_t Gcd(int64_t a, int64_t b) { return b == 0 ? a : Gcd(b, a % b); }

std::vector<int64_t> SampleWithoutReplacement(int64_t n, int64_t k,
                                              std::mt19937_64& rng) {
  std::vector<int64_t> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<size_t>(k));
  return idx;
}

}  // namespace

double ScaledNll(const Matrix& logits, const Labels& labels, double t) {
  double total = 0.0;
  Eigen::RowVectorXd row(logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    row = logits.row(i) / t;
    total += NegLogSoftmax({row.data(), static_cast<size_t>(row.size())},
                           labels[static_cast<size_t>(i)]);
  }
  return total / static_cast<double>(logits.rows());
}

TemperatureScaler FitTemperature(const Matrix& val_logits,
                                 const Labels& val_labels) {
  RequireLabeled(val_logits, val_labels, "temperature validation split");
  RequireFinite(val_logits, "temperature validation logits");
  if (std::set<int32_t>(val_labels.begin(), val_labels.end()).size() < 2) {
    Fail(ErrorKind::kValidation,
         "temperature scaling needs at least two classes present in the "
         "validation labels");
  }
  auto objective = [&](double log_t) {
    return ScaledNll(val_logits, val_labels, std::exp(log_t));
  };
  const double lo0 = std::log(kMinTemperature);
  const double hi0 = std::log(kMaxTemperature);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = lo0, hi = hi0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  while (hi - lo > 1e-9) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    }
  }
  double best_x = f1 <= f2 ? x1 : x2;
  double best_f = std::min(f1, f2);
  for (double edge : {lo0, hi0}) {
    const double fe = objective(edge);
    if (fe < best_f) {
      best_f = fe;
      best_x = edge;
    }
  }
  TemperatureScaler scaler;
  scaler.temperature = best_x == lo0   ? kMinTemperature
                       : best_x == hi0 ? kMaxTemperature
                                       : std::exp(best_x);
  return scaler;
}

std::string_view MethodName(Method m) {
  switch (m) {
    case Method::kAc:
      return "AC";
    case Method::kDoc:
      return "DoC";
    case Method::kAtcNe:
      return "ATC_NE";
    case Method::kAtcMc:
      return "ATC_MC";
    case Method::kCot:
      return "COT";
    case Method::kDis2:
      return "DIS2";
    case Method::kDis2NoDelta:
      return "DIS2_NO_DELTA";
  }
  return "unknown";
}

std::optional<Method> ParseMethod(std::string_view name) {
  for (Method m : {Method::kAc, Method::kDoc, Method::kAtcNe, Method::kAtcMc,
                   Method::kCot, Method::kDis2, Method::kDis2NoDelta}) {
    if (MethodName(m) == name) return m;
  }
  return std::nullopt;
}

ErrorEstimate AcEstimate(const Matrix& target_logits,
                         const TemperatureScaler& scaler) {
  RequireNonempty(target_logits, "AC target split");
  const Vector conf = MaxConfidence(scaler.Apply(target_logits));
  ErrorEstimate e;
  e.method = Method::kAc;
  e.metadata["mean_confidence"] = conf.mean();
  e.predicted_error = 1.0 - conf.mean();
  e.metadata["temperature"] = scaler.temperature;
  return e;
}

ErrorEstimate DocEstimate(const Matrix& source_val_logits,
                          const Labels& source_val_labels,
                          const Matrix& target_logits,
                          const TemperatureScaler& scaler) {
  RequireLabeled(source_val_logits, source_val_labels, "DoC source split");
  RequireNonempty(target_logits, "DoC target split");
  const Matrix source = scaler.Apply(source_val_logits);
  const double source_error = ErrorRate(ArgmaxRows(source), source_val_labels);
  const double conf_s = MaxConfidence(source).mean();
  const double conf_t = MaxConfidence(scaler.Apply(target_logits)).mean();
  ErrorEstimate e;
  e.method = Method::kDoc;
  e.predicted_error = source_error + (conf_s - conf_t);
  e.metadata["source_error"] = source_error;
  e.metadata["source_confidence"] = conf_s;
  e.metadata["target_confidence"] = conf_t;
  e.metadata["temperature"] = scaler.temperature;
  return e;
}

ErrorEstimate AtcEstimate(const Matrix& source_val_logits,
                          const Labels& source_val_labels,
                          const Matrix& target_logits, AtcScore score,
                          const TemperatureScaler& scaler) {
  RequireLabeled(source_val_logits, source_val_labels, "ATC source split");
  RequireNonempty(target_logits, "ATC target split");
  const Matrix source = scaler.Apply(source_val_logits);
  const Labels pred = ArgmaxRows(source);
  int64_t mistakes = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    mistakes += pred[i] != source_val_labels[i];
  }
  const Vector s = Scores(source, score);
  std::vector<double> sorted(s.data(), s.data() + s.size());
  std::sort(sorted.begin(), sorted.end());
  const double threshold =
      mistakes == 0 ? -std::numeric_limits<double>::infinity()
                    : sorted[static_cast<size_t>(mistakes - 1)];

  const Vector t = Scores(scaler.Apply(target_logits), score);
  int64_t below = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) below += t(i) < threshold;

  ErrorEstimate e;
  e.method = score == AtcScore::kNegEntropy ? Method::kAtcNe : Method::kAtcMc;
  e.predicted_error = static_cast<double>(below) / static_cast<double>(t.size());
  e.metadata["threshold"] = threshold;
  e.metadata["source_mistakes"] = static_cast<double>(mistakes);
  e.metadata["temperature"] = scaler.temperature;
  return e;
}

CotSolver DefaultCotSolver(int64_t n_target, int64_t n_source) {
  return n_target * n_source <= kCotExactLimit ? CotSolver::kExact
                                               : CotSolver::kSubsampledAssignment;
}

ErrorEstimate CotEstimate(const Labels& source_val_labels,
                          const Matrix& target_logits,
                          const TemperatureScaler& scaler, CotSolver solver,
                          uint64_t seed) {
  RequireNonempty(target_logits, "COT target split");
  if (source_val_labels.empty()) {
    Fail(ErrorKind::kDomain, "COT needs source labels");
  }
  const int64_t classes = target_logits.cols();
  for (int32_t y : source_val_labels) {
    if (y < 0 || y >= classes) {
      Fail(ErrorKind::kValidation, "COT: invalid label " + std::to_string(y));
    }
  }
  const Matrix probs = SoftmaxRows(scaler.Apply(target_logits));
  const int64_t n = probs.rows();
  const auto m = static_cast<int64_t>(source_val_labels.size());

  // ||s_i - e_k||_2 for every target row and class.
  auto class_cost = [&](const Matrix& p) {
    Matrix c(p.rows(), classes);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double sq = p.row(i).squaredNorm();
      for (Eigen::Index k = 0; k < classes; ++k) {
        c(i, k) = std::sqrt(std::max(0.0, sq - 2.0 * p(i, k) + 1.0));
      }
    }
    return c;
  };

  ErrorEstimate e;
  e.method = Method::kCot;
  double cost = 0.0;
  if (solver == CotSolver::kExact) {
    if (n * m > kCotExactLimit) {
      Fail(ErrorKind::kDomain,
           "exact COT refused: n*m = " + std::to_string(n * m) +
               " exceeds " + std::to_string(kCotExactLimit));
    }
    // Uniform marginals 1/n and 1/m become integers after scaling by
    // lcm(n, m); labels of one class share a sink.
    const int64_t lcm = n / Gcd(n, m) * m;
    std::vector<int64_t> supply(static_cast<size_t>(n), lcm / n);
    std::vector<int64_t> demand(static_cast<size_t>(classes), 0);
    for (int32_t y : source_val_labels) demand[static_cast<size_t>(y)] += lcm / m;
    const TransportResult t = SolveTransport(class_cost(probs), supply, demand);
    cost = 0.5 * t.cost / static_cast<double>(lcm);
    e.metadata["exact"] = 1.0;
    e.metadata["sample_size"] = static_cast<double>(std::max(n, m));
  } else {
    const int64_t k = std::min({kCotSubsampleSize, n, m});
    std::mt19937_64 rng(seed);
    const auto rows = SampleWithoutReplacement(n, k, rng);
    const auto labels = SampleWithoutReplacement(m, k, rng);
    Matrix sub(k, classes);
    for (int64_t r = 0; r < k; ++r) sub.row(r) = probs.row(rows[static_cast<size_t>(r)]);
    const Matrix per_class = class_cost(sub);
    Matrix square(k, k);
    for (int64_t r = 0; r < k; ++r) {
      for (int64_t j = 0; j < k; ++j) {
        square(r, j) =
            per_class(r, source_val_labels[static_cast<size_t>(labels[static_cast<size_t>(j)])]);
      }
    }
    cost = 0.5 * SolveAssignment(square).cost / static_cast<double>(k);
    e.metadata["exact"] = 0.0;
    e.metadata["sample_size"] = static_cast<double>(k);
  }
  e.predicted_error = cost;
  e.metadata["cost"] = cost;
  e.metadata["temperature"] = scaler.temperature;
  return e;
}

}  // namespace dis2
