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

#include "dis2/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dis2/error.h"
#include "dis2/seed.h"
#include "dis2/softmax.h"

namespace dis2 {
namespace {

Vector RandomUnit(int64_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(d);
  do {
    for (int64_t j = 0; j < d; ++j) v(j) = normal(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

std::vector<double> Weights(const SynthConfig& config) {
  if (config.class_weights.empty()) {
    return std::vector<double>(static_cast<size_t>(config.classes),
                               1.0 / config.classes);
  }
  return config.class_weights;
}

}  // namespace

void SynthConfig::Validate() const {
  if (classes < 2) Fail(ErrorKind::kValidation, "synth: classes must be >= 2");
  if (dim < 1) Fail(ErrorKind::kValidation, "synth: dim must be >= 1");
  if (source_per_class < 1) {
    Fail(ErrorKind::kValidation, "synth: source_per_class must be >= 1");
  }
  if (target_total < classes) {
    Fail(ErrorKind::kValidation, "synth: target_total must be >= classes");
  }
  if (!(separation > 0.0) || !std::isfinite(separation)) {
    Fail(ErrorKind::kValidation, "synth: separation must be positive");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    Fail(ErrorKind::kValidation, "synth: noise must be nonnegative");
  }
  if (!std::isfinite(shift_scale) || !std::isfinite(rotation_angle)) {
    Fail(ErrorKind::kValidation, "synth: shift and rotation must be finite");
  }
  if (shift_direction) {
    if (shift_direction->size() != dim) {
      Fail(ErrorKind::kShape, "synth: shift_direction length must equal dim");
    }
    if (!shift_direction->allFinite() || shift_direction->norm() == 0.0) {
      Fail(ErrorKind::kValidation, "synth: shift_direction must be nonzero");
    }
  }
  if (rotation_angle != 0.0 && dim < 2) {
    Fail(ErrorKind::kValidation, "synth: rotation needs dim >= 2");
  }
  if (!class_weights.empty()) {
    if (static_cast<int>(class_weights.size()) != classes) {
      Fail(ErrorKind::kValidation,
           "synth: class_weights must have one entry per class");
    }
    double sum = 0.0;
    for (double w : class_weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        Fail(ErrorKind::kValidation, "synth: class_weights must be >= 0");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      Fail(ErrorKind::kValidation, "synth: class_weights must sum to 1");
    }
  }
}

Matrix SyntheticClassMeans(const SynthConfig& config) {
  config.Validate();
  Matrix means = Matrix::Zero(config.classes, config.dim);
  const double r = config.separation / std::sqrt(2.0);
  if (config.classes <= config.dim) {
    for (int k = 0; k < config.classes; ++k) means(k, k) = r;
  } else {
    std::mt19937_64 rng(DeriveSeed(config.seed, "synth.means"));
    for (int k = 0; k < config.classes; ++k) {
      means.row(k) = r * RandomUnit(config.dim, rng).transpose();
    }
  }
  return means;
}

std::vector<int64_t> TargetClassCounts(const SynthConfig& config) {
  config.Validate();
  const std::vector<double> w = Weights(config);
  const auto c = static_cast<size_t>(config.classes);
  std::vector<int64_t> counts(c);
  std::vector<double> remainder(c);
  int64_t assigned = 0;
  for (size_t k = 0; k < c; ++k) {
    const double exact = w[k] * static_cast<double>(config.target_total);
    counts[k] = static_cast<int64_t>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(counts[k]);
    assigned += counts[k];
  }
  std::vector<size_t> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainder[a] > remainder[b];
  });
  for (size_t i = 0; assigned < config.target_total; ++i, ++assigned) {
    ++counts[order[i % c]];
  }
  return counts;
}

std::pair<EmbeddingDataset, EmbeddingDataset> GenerateSyntheticShift(
    const SynthConfig& config) {
  config.Validate();
  const Matrix means = SyntheticClassMeans(config);
  const int64_t d = config.dim;

  std::mt19937_64 geo_rng(DeriveSeed(config.seed, "synth.geometry"));
  Vector shift = Vector::Zero(d);
  if (config.shift_scale != 0.0) {
    const Vector dir = config.shift_direction
                           ? Vector(*config.shift_direction /
                                    config.shift_direction->norm())
                           : RandomUnit(d, geo_rng);
    shift = config.shift_scale * dir;
  }
  Eigen::MatrixXd rotation = Eigen::MatrixXd::Identity(d, d);
  if (config.rotation_angle != 0.0) {
    const Vector u = RandomUnit(d, geo_rng);
    Vector v = RandomUnit(d, geo_rng);
    v -= v.dot(u) * u;
    while (v.norm() < 1e-9) {
      v = RandomUnit(d, geo_rng);
      v -= v.dot(u) * u;
    }
    v /= v.norm();
    const double c = std::cos(config.rotation_angle) - 1.0;
    const double s = std::sin(config.rotation_angle);
    rotation += c * (u * u.transpose() + v * v.transpose()) +
                s * (v * u.transpose() - u * v.transpose());
  }

  auto sample = [&](const std::vector<int64_t>& counts, std::string_view name,
                    bool target) {
    std::mt19937_64 rng(DeriveSeed(config.seed, name));
    std::normal_distribution<double> normal;
    const int64_t n = std::accumulate(counts.begin(), counts.end(), int64_t{0});
    Labels labels;
    labels.reserve(static_cast<size_t>(n));
    for (size_t k = 0; k < counts.size(); ++k) {
      labels.insert(labels.end(), static_cast<size_t>(counts[k]),
                    static_cast<int32_t>(k));
    }
    std::shuffle(labels.begin(), labels.end(), rng);
    EmbeddingDataset out;
    out.classes = config.classes;
    out.domain_tag = std::string(name);
    out.features.resize(n, d);
    for (int64_t i = 0; i < n; ++i) {
      Vector x = means.row(labels[static_cast<size_t>(i)]).transpose();
      for (int64_t j = 0; j < d; ++j) x(j) += config.noise * normal(rng);
      if (target) x = rotation * x + shift;
      out.features.row(i) = x.transpose();
    }
    out.labels = std::move(labels);
    return out;
  };

  const std::vector<int64_t> source_counts(static_cast<size_t>(config.classes),
                                           config.source_per_class);
  EmbeddingDataset source = sample(source_counts, "source", false);
  EmbeddingDataset target = sample(TargetClassCounts(config), "target", true);
  return {std::move(source), std::move(target)};
}

LinearHead FitLinearProbe(const EmbeddingDataset& data,
                          const ProbeConfig& config) {
  if (!data.labels) Fail(ErrorKind::kValidation, "probe needs labels");
  if (data.n() == 0) Fail(ErrorKind::kDomain, "probe needs data");
  if (config.steps < 1 || !(config.learning_rate > 0.0)) {
    Fail(ErrorKind::kValidation, "probe: steps and learning_rate must be > 0");
  }
  const int c = data.classes;
  const int64_t d = data.d();
  const double n = static_cast<double>(data.n());
  LinearHead head{Matrix::Zero(c, d), Vector::Zero(c)};
  Matrix mw = Matrix::Zero(c, d), vw = Matrix::Zero(c, d);
  Vector mb = Vector::Zero(c), vb = Vector::Zero(c);
  constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8;
  Matrix onehot = Matrix::Zero(data.n(), c);
  for (int64_t i = 0; i < data.n(); ++i) {
    onehot(i, (*data.labels)[static_cast<size_t>(i)]) = 1.0;
  }
  for (int step = 1; step <= config.steps; ++step) {
    const Matrix residual = (SoftmaxRows(head.Apply(data.features)) - onehot) / n;
    const Matrix gw = residual.transpose() * data.features + config.l2 * head.weights;
    const Vector gb = residual.colwise().sum().transpose();
    mw = kB1 * mw + (1 - kB1) * gw;
    vw = kB2 * vw + (1 - kB2) * gw.cwiseAbs2();
    mb = kB1 * mb + (1 - kB1) * gb;
    vb = kB2 * vb + (1 - kB2) * gb.cwiseAbs2();
    const double c1 = 1.0 - std::pow(kB1, step);
    const double c2 = 1.0 - std::pow(kB2, step);
    head.weights.array() -= config.learning_rate * (mw.array() / c1) /
                            ((vw.array() / c2).sqrt() + kEps);
    head.bias.array() -= config.learning_rate * (mb.array() / c1) /
                         ((vb.array() / c2).sqrt() + kEps);
  }
  return head;
}

}  // namespace dis2
