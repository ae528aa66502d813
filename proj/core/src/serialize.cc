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

#include "dis2/serialize.h"

#include <cmath>
#include <limits>

#include "dis2/error.h"

namespace dis2 {
namespace {

using nlohmann::json;

template <typename T>
T Get(const json& j, const char* key) {
  if (!j.contains(key)) {
    Fail(ErrorKind::kValidation, std::string("missing field: ") + key);
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    Fail(ErrorKind::kValidation, std::string("bad field: ") + key);
  }
}

double GetNumber(const json& j, const char* key) {
  if (!j.contains(key)) {
    Fail(ErrorKind::kValidation, std::string("missing field: ") + key);
  }
  return NumberFromJson(j.at(key));
}

Method GetMethod(const json& j) {
  const auto m = ParseMethod(Get<std::string>(j, "method"));
  if (!m) Fail(ErrorKind::kValidation, "unknown method");
  return *m;
}

}  // namespace

json NumberToJson(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double NumberFromJson(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  Fail(ErrorKind::kValidation, "expected a number");
}

json ToJson(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"weight_decay", c.weight_decay},
          {"seed", c.seed},
          {"optimizer", OptimizerName(c.optimizer)},
          {"loss_variant", LossVariantName(c.loss_variant)},
          {"normalize_source_loss", c.normalize_source_loss},
          {"momentum", c.momentum}};
}

TrainConfig TrainConfigFromJson(const json& j) {
  TrainConfig c;
  c.learning_rate = GetNumber(j, "learning_rate");
  c.epochs = Get<int>(j, "epochs");
  c.batch_size = Get<int>(j, "batch_size");
  c.weight_decay = GetNumber(j, "weight_decay");
  c.seed = Get<uint64_t>(j, "seed");
  const auto opt = ParseOptimizer(Get<std::string>(j, "optimizer"));
  if (!opt) Fail(ErrorKind::kValidation, "unknown optimizer");
  c.optimizer = *opt;
  const auto loss = ParseLossVariant(Get<std::string>(j, "loss_variant"));
  if (!loss) Fail(ErrorKind::kValidation, "unknown loss_variant");
  c.loss_variant = *loss;
  c.normalize_source_loss = Get<bool>(j, "normalize_source_loss");
  c.momentum = GetNumber(j, "momentum");
  c.Validate();
  return c;
}

json ToJson(const BoundReport& r) {
  return {{"source_error", NumberToJson(r.source_error)},
          {"discrepancy", NumberToJson(r.discrepancy)},
          {"n_source", r.n_source},
          {"n_target", r.n_target},
          {"delta", NumberToJson(r.delta)},
          {"concentration", NumberToJson(r.concentration)},
          {"bound_with_delta", NumberToJson(r.bound_with_delta)},
          {"bound_without_delta", NumberToJson(r.bound_without_delta)}};
}

BoundReport BoundReportFromJson(const json& j) {
  BoundReport r;
  r.source_error = GetNumber(j, "source_error");
  r.discrepancy = GetNumber(j, "discrepancy");
  r.n_source = Get<int64_t>(j, "n_source");
  r.n_target = Get<int64_t>(j, "n_target");
  r.delta = GetNumber(j, "delta");
  r.concentration = GetNumber(j, "concentration");
  r.bound_with_delta = GetNumber(j, "bound_with_delta");
  r.bound_without_delta = GetNumber(j, "bound_without_delta");
  return r;
}

json ToJson(const ErrorEstimate& e) {
  json meta = json::object();
  for (const auto& [k, v] : e.metadata) meta[k] = NumberToJson(v);
  return {{"method", MethodName(e.method)},
          {"predicted_error", NumberToJson(e.predicted_error)},
          {"metadata", meta}};
}

ErrorEstimate ErrorEstimateFromJson(const json& j) {
  ErrorEstimate e;
  e.method = GetMethod(j);
  e.predicted_error = GetNumber(j, "predicted_error");
  if (j.contains("metadata")) {
    for (const auto& [k, v] : j.at("metadata").items()) {
      e.metadata[k] = NumberFromJson(v);
    }
  }
  return e;
}

json ToJson(const EvaluationRecord& r) {
  json estimates = json::array();
  for (const auto& [m, e] : r.estimates) estimates.push_back(ToJson(e));
  json j = {{"shift_id", r.shift_id},
            {"group", r.group},
            {"true_target_error", NumberToJson(r.true_target_error)},
            {"n_source", r.n_source},
            {"n_target", r.n_target},
            {"estimates", estimates}};
  if (r.bound) j["bound"] = ToJson(*r.bound);
  if (r.certificate) j["certificate"] = CertificateName(*r.certificate);
  return j;
}

EvaluationRecord EvaluationRecordFromJson(const json& j) {
  EvaluationRecord r;
  r.shift_id = Get<std::string>(j, "shift_id");
  r.group = Get<std::string>(j, "group");
  r.true_target_error = GetNumber(j, "true_target_error");
  r.n_source = Get<int64_t>(j, "n_source");
  r.n_target = Get<int64_t>(j, "n_target");
  if (j.contains("estimates")) {
    for (const auto& e : j.at("estimates")) {
      ErrorEstimate est = ErrorEstimateFromJson(e);
      r.estimates[est.method] = std::move(est);
    }
  }
  if (j.contains("bound")) r.bound = BoundReportFromJson(j.at("bound"));
  if (j.contains("certificate")) {
    const auto name = Get<std::string>(j, "certificate");
    if (name == CertificateName(Certificate::kProven)) {
      r.certificate = Certificate::kProven;
    } else if (name == CertificateName(Certificate::kInconclusive)) {
      r.certificate = Certificate::kInconclusive;
    } else {
      Fail(ErrorKind::kValidation, "unknown certificate " + name);
    }
  }
  return r;
}

json ToJson(const MetricsSummary& s) {
  json methods = json::array();
  for (const auto& m : s.methods) {
    methods.push_back({{"method", MethodName(m.method)},
                       {"count", m.count},
                       {"mae", NumberToJson(m.mae)},
                       {"coverage", NumberToJson(m.coverage)},
                       {"conditional_overestimation",
                        NumberToJson(m.conditional_overestimation)}});
  }
  return {{"records", s.records},
          {"failed_shifts", s.failed_shifts},
          {"methods", methods}};
}

json ToJson(const SweepResult& s) {
  json records = json::array();
  for (const auto& r : s.records) {
    records.push_back({{"k", r.k},
                       {"p", r.p},
                       {"bound", ToJson(r.bound)},
                       {"validity_score", NumberToJson(r.validity_score)}});
  }
  json j = {{"records", records}};
  if (s.logits_bound) j["logits_bound"] = ToJson(*s.logits_bound);
  if (s.score_threshold) j["score_threshold"] = *s.score_threshold;
  if (s.selected_bound) j["selected_bound"] = NumberToJson(*s.selected_bound);
  if (s.selected_k) j["selected_k"] = *s.selected_k;
  return j;
}

json ToJson(const AdjustmentParams& p) {
  return {{"mode", AdjustmentModeName(p.mode)},
          {"value", NumberToJson(p.value)},
          {"alpha", NumberToJson(p.alpha)},
          {"trained_on", p.trained_on},
          {"saturated", p.saturated}};
}

AdjustmentParams AdjustmentParamsFromJson(const json& j) {
  AdjustmentParams p;
  const auto mode = ParseAdjustmentMode(Get<std::string>(j, "mode"));
  if (!mode) Fail(ErrorKind::kValidation, "unknown adjustment mode");
  p.mode = *mode;
  p.value = GetNumber(j, "value");
  p.alpha = GetNumber(j, "alpha");
  p.trained_on = Get<std::vector<std::string>>(j, "trained_on");
  p.saturated = Get<bool>(j, "saturated");
  if (p.mode == AdjustmentMode::kScale && !(p.value > 0.0)) {
    Fail(ErrorKind::kValidation, "scale adjustment must be positive");
  }
  return p;
}

json ToJson(const LoocvResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"held_out", f.held_out},
                     {"params", ToJson(f.params)},
                     {"training_coverage", f.training_coverage},
                     {"held_out_coverage", f.held_out_coverage},
                     {"held_out_mae", f.held_out_mae},
                     {"held_out_count", f.adjusted.size()}});
  }
  return {{"method", MethodName(r.method)},
          {"mode", AdjustmentModeName(r.mode)},
          {"alpha", r.alpha},
          {"folds", folds}};
}

}  // namespace dis2
