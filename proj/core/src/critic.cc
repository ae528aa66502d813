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

#include "dis2/critic.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "dis2/error.h"
#include "dis2/serialize.h"
#include "dis2/softmax.h"

namespace dis2 {
namespace {

// Endless stream of row indices formed by back-to-back shuffles.
class BatchStream {
 public:
  BatchStream(int64_t n, std::mt19937_64& rng) : order_(n), rng_(rng) {
    std::iota(order_.begin(), order_.end(), 0);
    Reshuffle();
  }

  void Reshuffle() {
    std::shuffle(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
  }

  void Next(int batch, std::vector<int64_t>& out) {
    out.clear();
    while (static_cast<int>(out.size()) < batch) {
      if (cursor_ == order_.size()) Reshuffle();
      out.push_back(order_[cursor_++]);
    }
  }

 private:
  std::vector<int64_t> order_;
  std::mt19937_64& rng_;
  size_t cursor_ = 0;
};

// Accumulates dLoss/dW and dLoss/db for one side of the objective and returns
// the mean loss over the batch.
template <typename LossFn>
double AccumulateSide(const Matrix& x, std::span<const int64_t> rows,
                      std::span<const int32_t> pseudo, const Matrix& weights,
                      const Vector& bias, Matrix& batch, Matrix& logit_grad,
                      Matrix& grad_w, Vector& grad_b, LossFn loss) {
  const auto b = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index classes = weights.rows();
  batch.resize(b, x.cols());
  for (Eigen::Index r = 0; r < b; ++r) batch.row(r) = x.row(rows[r]);
  Matrix logits = batch * weights.transpose();
  logits.rowwise() += bias.transpose();
  logit_grad.resize(b, classes);
  double total = 0.0;
  for (Eigen::Index r = 0; r < b; ++r) {
    total += loss(
        std::span<const double>(logits.row(r).data(),
                                static_cast<size_t>(classes)),
        pseudo[static_cast<size_t>(rows[r])],
        std::span<double>(logit_grad.row(r).data(),
                          static_cast<size_t>(classes)));
  }
  const double inv = 1.0 / static_cast<double>(b);
  logit_grad *= inv;
  grad_w.noalias() += logit_grad.transpose() * batch;
  grad_b += logit_grad.colwise().sum().transpose();
  return total * inv;
}

// Full-pass mean loss of one side, used for the per-epoch objective log.
template <typename LossFn>
double MeanLoss(const Matrix& logits, std::span<const int32_t> pseudo,
                LossFn loss) {
  std::vector<double> scratch(static_cast<size_t>(logits.cols()));
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    total += loss(std::span<const double>(logits.row(r).data(),
                                          static_cast<size_t>(logits.cols())),
                  pseudo[static_cast<size_t>(r)], std::span<double>(scratch));
  }
  return total / static_cast<double>(logits.rows());
}

double Agreement(std::span<const int32_t> a, std::span<const int32_t> b) {
  size_t same = 0;
  for (size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

double DisagreementRate(std::span<const int32_t> a,
                        std::span<const int32_t> b) {
  size_t differ = 0;
  for (size_t i = 0; i < a.size(); ++i) differ += a[i] != b[i];
  return static_cast<double>(differ) / static_cast<double>(a.size());
}

void CheckPseudo(const Matrix& x, const Labels& pseudo, int classes,
                 const char* what) {
  if (static_cast<int64_t>(pseudo.size()) != x.rows()) {
    Fail(ErrorKind::kShape, std::string(what) + ": " +
                                std::to_string(pseudo.size()) +
                                " predictions for " + std::to_string(x.rows()) +
                                " rows");
  }
  for (int32_t y : pseudo) {
    if (y < 0 || y >= classes) {
      Fail(ErrorKind::kValidation,
           std::string(what) + ": prediction outside class range");
    }
  }
  if (x.rows() == 0) Fail(ErrorKind::kDomain, std::string(what) + " is empty");
}

}  // namespace

std::string InputSpace::ToString() const {
  switch (kind) {
    case InputSpaceKind::kFeatures:
      return "features";
    case InputSpaceKind::kLogits:
      return "logits";
    case InputSpaceKind::kTopPcs:
      return "top_pcs(" + std::to_string(dim) + ")";
  }
  return "unknown";
}

std::optional<InputSpace> InputSpace::Parse(std::string_view text) {
  if (text == "features") return InputSpace{InputSpaceKind::kFeatures, 0};
  if (text == "logits") return InputSpace{InputSpaceKind::kLogits, 0};
  constexpr std::string_view kPrefix = "top_pcs(";
  if (text.starts_with(kPrefix) && text.ends_with(")")) {
    const std::string_view digits =
        text.substr(kPrefix.size(), text.size() - kPrefix.size() - 1);
    int64_t p = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), p);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && p > 0) {
      return InputSpace{InputSpaceKind::kTopPcs, p};
    }
  }
  return std::nullopt;
}

Labels LinearCritic::Predict(const Matrix& x) const {
  return ArgmaxRows(head.Apply(x));
}

std::string_view OptimizerName(Optimizer o) {
  return o == Optimizer::kAdam ? "adam" : "sgd_momentum";
}

std::optional<Optimizer> ParseOptimizer(std::string_view name) {
  if (name == "adam") return Optimizer::kAdam;
  if (name == "sgd_momentum" || name == "sgd") return Optimizer::kSgdMomentum;
  return std::nullopt;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    Fail(ErrorKind::kDomain, "learning_rate must be positive");
  }
  if (epochs < 1) Fail(ErrorKind::kDomain, "epochs must be >= 1");
  if (batch_size < 1) Fail(ErrorKind::kDomain, "batch_size must be >= 1");
  if (!(weight_decay >= 0.0)) {
    Fail(ErrorKind::kDomain, "weight_decay must be non-negative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    Fail(ErrorKind::kDomain, "momentum must lie in [0, 1)");
  }
}

void CriticProblem::Validate() const {
  if (classes < 2) Fail(ErrorKind::kDomain, "critic needs at least 2 classes");
  CheckPseudo(source_train, source_train_pseudo, classes, "source_train");
  CheckPseudo(target_train, target_train_pseudo, classes, "target_train");
  CheckPseudo(source_holdout, source_holdout_pseudo, classes,
              "source_holdout");
  CheckPseudo(target_holdout, target_holdout_pseudo, classes,
              "target_holdout");
  const int64_t p = source_train.cols();
  for (const Matrix* m : {&target_train, &source_holdout, &target_holdout}) {
    if (m->cols() != p) {
      Fail(ErrorKind::kShape, "critic inputs disagree on dimension");
    }
  }
  if (input_space.dim != 0 && input_space.dim != p) {
    Fail(ErrorKind::kShape, "input space " + input_space.ToString() +
                                " does not match input dim " +
                                std::to_string(p));
  }
}

double DiscrepancyFromPredictions(std::span<const int32_t> hat_source,
                                  std::span<const int32_t> critic_source,
                                  std::span<const int32_t> hat_target,
                                  std::span<const int32_t> critic_target) {
  if (hat_source.size() != critic_source.size() ||
      hat_target.size() != critic_target.size()) {
    Fail(ErrorKind::kShape, "discrepancy: prediction length mismatch");
  }
  if (hat_source.empty() || hat_target.empty()) {
    Fail(ErrorKind::kDomain, "discrepancy of an empty split");
  }
  return DisagreementRate(hat_target, critic_target) -
         DisagreementRate(hat_source, critic_source);
}

double EmpiricalDiscrepancy(const LinearCritic& critic,
                            std::span<const int32_t> hat_source,
                            std::span<const int32_t> hat_target,
                            const Matrix& source, const Matrix& target) {
  if (static_cast<int64_t>(hat_source.size()) != source.rows() ||
      static_cast<int64_t>(hat_target.size()) != target.rows()) {
    Fail(ErrorKind::kShape, "discrepancy: prediction/row count mismatch");
  }
  const Labels cs = critic.Predict(source);
  const Labels ct = critic.Predict(target);
  return DiscrepancyFromPredictions(hat_source, cs, hat_target, ct);
}

CriticFitResult TrainCritic(const CriticProblem& problem,
                            const TrainConfig& config) {
  problem.Validate();
  config.Validate();
  const Eigen::Index classes = problem.classes;
  const Eigen::Index p = problem.source_train.cols();

  Matrix w = Matrix::Zero(classes, p);
  Vector b = Vector::Zero(classes);
  if (problem.initial_head && problem.initial_head->weights.rows() == classes &&
      problem.initial_head->weights.cols() == p) {
    w = problem.initial_head->weights;
    b = problem.initial_head->bias;
  }

  auto source_loss = [normalize = config.normalize_source_loss](
                         std::span<const double> z, int y,
                         std::span<double> g) {
    return LogisticLossKernel(z, y, normalize, g);
  };
  auto target_loss = [variant = config.loss_variant](std::span<const double> z,
                                                     int y,
                                                     std::span<double> g) {
    return TargetLossKernel(variant, z, y, g);
  };

  // Optimizer state.
  Matrix m_w = Matrix::Zero(classes, p), v_w = Matrix::Zero(classes, p);
  Vector m_b = Vector::Zero(classes), v_b = Vector::Zero(classes);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  int64_t step = 0;

  std::mt19937_64 rng(config.seed);
  BatchStream source_stream(problem.source_train.rows(), rng);
  BatchStream target_stream(problem.target_train.rows(), rng);
  const int64_t larger =
      std::max(problem.source_train.rows(), problem.target_train.rows());
  const int64_t steps_per_epoch =
      (larger + config.batch_size - 1) / config.batch_size;
  const int batch_s = static_cast<int>(
      std::min<int64_t>(config.batch_size, problem.source_train.rows()));
  const int batch_t = static_cast<int>(
      std::min<int64_t>(config.batch_size, problem.target_train.rows()));

  CriticFitResult result;
  result.config = config;
  result.critic.input_space = problem.input_space;
  if (result.critic.input_space.dim == 0) result.critic.input_space.dim = p;

  std::vector<int64_t> rows_s, rows_t;
  Matrix batch, logit_grad;
  Matrix grad_w(classes, p);
  Vector grad_b(classes);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    source_stream.Reshuffle();
    target_stream.Reshuffle();
    for (int64_t s = 0; s < steps_per_epoch; ++s) {
      source_stream.Next(batch_s, rows_s);
      target_stream.Next(batch_t, rows_t);
      grad_w.setZero();
      grad_b.setZero();
      const double value =
          AccumulateSide(problem.source_train, rows_s,
                         problem.source_train_pseudo, w, b, batch, logit_grad,
                         grad_w, grad_b, source_loss) +
          AccumulateSide(problem.target_train, rows_t,
                         problem.target_train_pseudo, w, b, batch, logit_grad,
                         grad_w, grad_b, target_loss);
      if (!std::isfinite(value)) {
        Fail(ErrorKind::kDivergence,
             "critic objective became non-finite in epoch " +
                 std::to_string(epoch + 1) + " (lr " +
                 std::to_string(config.learning_rate) + ")");
      }
      if (config.weight_decay > 0.0) grad_w += config.weight_decay * w;

      ++step;
      if (config.optimizer == Optimizer::kSgdMomentum) {
        m_w = config.momentum * m_w + grad_w;
        m_b = config.momentum * m_b + grad_b;
        w -= config.learning_rate * m_w;
        b -= config.learning_rate * m_b;
      } else {
        m_w = kBeta1 * m_w + (1.0 - kBeta1) * grad_w;
        m_b = kBeta1 * m_b + (1.0 - kBeta1) * grad_b;
        v_w = kBeta2 * v_w + (1.0 - kBeta2) * grad_w.cwiseAbs2();
        v_b = kBeta2 * v_b + (1.0 - kBeta2) * grad_b.cwiseAbs2();
        const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        const double lr_t = config.learning_rate * std::sqrt(c2) / c1;
        w.array() -= lr_t * m_w.array() / (v_w.array().sqrt() + kEps);
        b.array() -= lr_t * m_b.array() / (v_b.array().sqrt() + kEps);
      }
    }

    const LinearHead current{w, b};
    const Matrix zs = current.Apply(problem.source_train);
    const Matrix zt = current.Apply(problem.target_train);
    const Labels ps = ArgmaxRows(zs);
    const Labels pt = ArgmaxRows(zt);
    result.agreement_trajectory.push_back(
        Agreement(ps, problem.source_train_pseudo));
    result.objective_trajectory.push_back(
        MeanLoss(zs, problem.source_train_pseudo, source_loss) +
        MeanLoss(zt, problem.target_train_pseudo, target_loss));
    result.train_discrepancy_trajectory.push_back(DiscrepancyFromPredictions(
        problem.source_train_pseudo, ps, problem.target_train_pseudo, pt));
  }

  result.critic.head = LinearHead{std::move(w), std::move(b)};
  result.holdout_discrepancy = EmpiricalDiscrepancy(
      result.critic, problem.source_holdout_pseudo,
      problem.target_holdout_pseudo, problem.source_holdout,
      problem.target_holdout);
  return result;
}

size_t SelectBestCriticIndex(std::span<const CriticFitResult> results) {
  if (results.empty()) Fail(ErrorKind::kDomain, "no critic results to select");
  size_t best = 0;
  for (size_t i = 1; i < results.size(); ++i) {
    if (results[i].holdout_discrepancy > results[best].holdout_discrepancy) {
      best = i;
    }
  }
  return best;
}

const CriticFitResult& SelectBestCritic(
    std::span<const CriticFitResult> results) {
  return results[SelectBestCriticIndex(results)];
}

std::vector<TrainConfig> DefaultSearchGrid(LossVariant variant) {
  std::vector<TrainConfig> grid;
  for (double lr : {1e-1, 1e-2, 1e-3}) {
    for (uint64_t seed : {0, 1, 2}) {
      for (Optimizer opt : {Optimizer::kSgdMomentum, Optimizer::kAdam}) {
        TrainConfig c;
        c.learning_rate = lr;
        c.seed = seed;
        c.optimizer = opt;
        c.loss_variant = variant;
        grid.push_back(c);
      }
    }
  }
  return grid;
}

CriticSearchResult RunCriticSearch(const CriticProblem& problem,
                                   std::span<const TrainConfig> grid) {
  if (grid.empty()) Fail(ErrorKind::kDomain, "empty critic search grid");
  CriticSearchResult out;
  out.runs.reserve(grid.size());
  for (const auto& config : grid) out.runs.push_back(TrainCritic(problem, config));
  out.best = SelectBestCriticIndex(out.runs);
  return out;
}

void SaveCritic(const CriticFitResult& result,
                const std::filesystem::path& prefix) {
  SaveLinearHead(result.critic.head, prefix.string() + ".weights",
                 prefix.string() + ".bias");
  nlohmann::json sidecar;
  sidecar["input_space"] = result.critic.input_space.ToString();
  sidecar["input_dim"] = result.critic.head.input_dim();
  sidecar["classes"] = result.critic.head.classes();
  sidecar["config"] = ToJson(result.config);
  sidecar["holdout_discrepancy"] = result.holdout_discrepancy;
  sidecar["agreement_trajectory"] = result.agreement_trajectory;
  std::ofstream out(prefix.string() + ".json", std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write critic sidecar");
  out << sidecar.dump(2) << '\n';
}

LinearCritic LoadCritic(const std::filesystem::path& prefix) {
  std::ifstream in(prefix.string() + ".json");
  if (!in) Fail(ErrorKind::kIo, "cannot open " + prefix.string() + ".json");
  nlohmann::json sidecar;
  try {
    sidecar = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kValidation, "critic sidecar: " + std::string(e.what()));
  }
  LinearCritic critic;
  critic.head = LoadLinearHead(prefix.string() + ".weights",
                               prefix.string() + ".bias");
  const auto space =
      InputSpace::Parse(sidecar.value("input_space", std::string()));
  if (!space) Fail(ErrorKind::kValidation, "critic sidecar: bad input_space");
  critic.input_space = *space;
  if (critic.input_space.dim == 0) {
    critic.input_space.dim = critic.head.input_dim();
  }
  if (critic.input_space.dim != critic.head.input_dim()) {
    Fail(ErrorKind::kShape, "critic sidecar dim disagrees with weights");
  }
  return critic;
}

}  // namespace dis2
