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

#include "dis2/suite.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <thread>

#include "dis2/error.h"
#include "dis2/reduction.h"
#include "dis2/seed.h"
#include "dis2/serialize.h"

namespace dis2 {
namespace {

const Labels& RequireLabels(const EmbeddingDataset& data,
                            const std::string& what) {
  if (!data.labels) Fail(ErrorKind::kValidation, what + " needs labels");
  return *data.labels;
}

std::vector<double> DirichletWeights(int classes, double alpha,
                                     std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> w(static_cast<size_t>(classes));
  double sum = 0.0;
  for (double& x : w) sum += (x = gamma(rng));
  for (double& x : w) x /= sum;
  // Absorb rounding so the weights sum to 1 within validation tolerance.
  w.back() = std::max(0.0, 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0));
  return w;
}

SuiteResult RunIndexed(int count,
                       const std::function<EvaluationRecord(int)>& run_one,
                       const std::function<std::string(int)>& id_of,
                       const std::vector<Method>& methods, int threads) {
  std::vector<std::optional<EvaluationRecord>> slots(static_cast<size_t>(count));
  std::vector<std::optional<ShiftFailure>> failed(static_cast<size_t>(count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        slots[static_cast<size_t>(i)] = run_one(i);
      } catch (const Error& e) {
        failed[static_cast<size_t>(i)] = ShiftFailure{
            id_of(i), std::string(ErrorKindName(e.kind())), e.what()};
      } catch (const std::exception& e) {
        failed[static_cast<size_t>(i)] =
            ShiftFailure{id_of(i), "internal", e.what()};
      }
    }
  };
  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  threads = std::min(threads, std::max(count, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SuiteResult result;
  for (auto& s : slots) {
    if (s) result.records.push_back(std::move(*s));
  }
  for (auto& f : failed) {
    if (f) result.failures.push_back(std::move(*f));
  }
  std::stable_sort(result.records.begin(), result.records.end(),
                   [](const auto& a, const auto& b) { return a.shift_id < b.shift_id; });
  std::stable_sort(result.failures.begin(), result.failures.end(),
                   [](const auto& a, const auto& b) { return a.shift_id < b.shift_id; });
  result.summary = Summarize(result.records, methods,
                             static_cast<int64_t>(result.failures.size()));
  return result;
}

}  // namespace

SynthConfig DefaultSuiteGeometry() {
  SynthConfig c;
  c.classes = 4;
  c.dim = 8;
  c.source_per_class = 1000;
  c.separation = 3.0;
  c.noise = 1.0;
  return c;
}

std::vector<Method> AllMethods() {
  return {Method::kAc,  Method::kDoc,  Method::kAtcNe,      Method::kAtcMc,
          Method::kCot, Method::kDis2, Method::kDis2NoDelta};
}

EvaluationRecord EvaluateShift(const ShiftInputs& shift,
                               const EvalOptions& options) {
  const Labels& source_labels = RequireLabels(shift.source_val, "source_val");
  const EmbeddingDataset& truth_split =
      shift.target_test ? *shift.target_test : shift.target_val;
  const Labels& truth_labels =
      RequireLabels(truth_split, shift.id + ": target truth split");

  EvaluationRecord record;
  record.shift_id = shift.id;
  record.group = shift.group;
  record.n_source = shift.source_val.n();
  record.n_target = shift.target_val.n();
  record.true_target_error =
      ErrorRate(shift.classifier.Predict(truth_split), truth_labels);

  auto wants = [&](Method m) {
    return std::find(options.methods.begin(), options.methods.end(), m) !=
           options.methods.end();
  };

  const bool any_baseline = wants(Method::kAc) || wants(Method::kDoc) ||
                            wants(Method::kAtcNe) || wants(Method::kAtcMc) ||
                            wants(Method::kCot);
  if (any_baseline) {
    const Matrix source_logits = shift.classifier.Logits(shift.source_val);
    const Matrix target_logits = shift.classifier.Logits(shift.target_val);
    const TemperatureScaler scaler = FitTemperature(source_logits, source_labels);
    if (wants(Method::kAc)) {
      record.estimates[Method::kAc] = AcEstimate(target_logits, scaler);
    }
    if (wants(Method::kDoc)) {
      record.estimates[Method::kDoc] =
          DocEstimate(source_logits, source_labels, target_logits, scaler);
    }
    if (wants(Method::kAtcNe)) {
      record.estimates[Method::kAtcNe] =
          AtcEstimate(source_logits, source_labels, target_logits,
                      AtcScore::kNegEntropy, scaler);
    }
    if (wants(Method::kAtcMc)) {
      record.estimates[Method::kAtcMc] =
          AtcEstimate(source_logits, source_labels, target_logits,
                      AtcScore::kMaxConfidence, scaler);
    }
    if (wants(Method::kCot)) {
      record.estimates[Method::kCot] = CotEstimate(
          source_labels, target_logits, scaler,
          DefaultCotSolver(target_logits.rows(), source_logits.rows()),
          DeriveSeed(options.seed, "cot:" + shift.id));
    }
  }

  if (wants(Method::kDis2) || wants(Method::kDis2NoDelta)) {
    std::optional<PcaBasis> basis;
    InputSpace space{options.space, 0};
    if (options.space == InputSpaceKind::kTopPcs) {
      if (options.pc_divisor < 1) {
        Fail(ErrorKind::kValidation, "pc divisor must be >= 1");
      }
      Matrix pooled(shift.source_train.n() + shift.target_train.n(),
                    shift.source_train.d());
      pooled << shift.source_train.features, shift.target_train.features;
      const PcaBasis full = FitPca(pooled);
      space.dim = std::max<int64_t>(1, full.input_dim() / options.pc_divisor);
      basis = full.Truncate(space.dim);
    }
    const Dis2Result r = EvaluateDis2(shift, space, options.grid, options.delta,
                                      basis ? &*basis : nullptr);
    auto make = [&](Method m, double value) {
      ErrorEstimate e;
      e.method = m;
      e.predicted_error = value;
      e.metadata["source_error"] = r.report.source_error;
      e.metadata["discrepancy"] = r.report.discrepancy;
      e.metadata["concentration"] = r.report.concentration;
      e.metadata["validity_score"] = r.validity_score;
      return e;
    };
    if (wants(Method::kDis2)) {
      record.estimates[Method::kDis2] =
          make(Method::kDis2, r.report.bound_with_delta);
    }
    if (wants(Method::kDis2NoDelta)) {
      record.estimates[Method::kDis2NoDelta] =
          make(Method::kDis2NoDelta, r.report.bound_without_delta);
    }
    record.bound = r.report;
    if (shift.target_val.labels) {
      const double holdout_error = ErrorRate(
          shift.classifier.Predict(shift.target_val), *shift.target_val.labels);
      record.certificate = AssumptionCertificate(r.report, holdout_error);
    }
  }
  return record;
}

ShiftInputs MakeSuiteShift(const SynthSuiteConfig& config, int index) {
  if (config.groups < 1) Fail(ErrorKind::kValidation, "suite groups must be >= 1");
  if (config.target_pool < 2 || config.target_test < 1) {
    Fail(ErrorKind::kValidation, "suite target sizes too small");
  }
  const auto i = static_cast<uint64_t>(index);
  std::mt19937_64 rng(DeriveSeed(config.seed, "suite.draws", i));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SynthConfig sc = config.base;
  sc.seed = DeriveSeed(config.seed, "suite.shift", i);
  sc.target_total = config.target_pool + config.target_test;
  sc.shift_scale = config.max_shift_scale * unit(rng);
  sc.rotation_angle = sc.dim >= 2 ? config.max_rotation * unit(rng) : 0.0;
  sc.class_weights = DirichletWeights(sc.classes, config.dirichlet_alpha, rng);
  sc.shift_direction.reset();

  auto [source, target] = GenerateSyntheticShift(sc);

  char id[32];
  std::snprintf(id, sizeof(id), "synth-%05d", index);
  ShiftInputs shift;
  shift.id = id;
  shift.group = "g" + std::to_string(index % config.groups);

  std::vector<int64_t> test_rows(static_cast<size_t>(config.target_test));
  std::iota(test_rows.begin(), test_rows.end(), 0);
  std::vector<int64_t> pool_rows(static_cast<size_t>(config.target_pool));
  std::iota(pool_rows.begin(), pool_rows.end(), config.target_test);
  shift.target_test = Subset(target, test_rows);
  const EmbeddingDataset pool = Subset(target, pool_rows);

  std::tie(shift.source_train, shift.source_val) = SplitHoldout(
      source, config.holdout_fraction, DeriveSeed(sc.seed, "source_val"));
  std::tie(shift.target_train, shift.target_val) = SplitHoldout(
      pool, config.holdout_fraction, DeriveSeed(sc.seed, "target_val"));
  shift.classifier =
      ClassifierUnderTest::FromHead(FitLinearProbe(shift.source_train, config.probe));
  return shift;
}

SuiteResult RunSynthSuite(const SynthSuiteConfig& config,
                          const EvalOptions& options, int threads) {
  if (config.shifts < 0) Fail(ErrorKind::kValidation, "negative shift count");
  config.base.Validate();
  auto id_of = [](int i) {
    char id[32];
    std::snprintf(id, sizeof(id), "synth-%05d", i);
    return std::string(id);
  };
  return RunIndexed(
      config.shifts,
      [&](int i) { return EvaluateShift(MakeSuiteShift(config, i), options); },
      id_of, options.methods, threads);
}

SuiteResult RunManifestSuite(const ManifestSuiteConfig& config,
                             const EvalOptions& options, int threads) {
  std::vector<std::string> ids;
  for (const auto& p : config.manifests) ids.push_back(p.stem().string());
  return RunIndexed(
      static_cast<int>(config.manifests.size()),
      [&](int i) {
        const ShiftManifest m = LoadManifest(config.manifests[static_cast<size_t>(i)]);
        ShiftInputs shift =
            LoadShift(m, config.classifier, config.holdout_fraction,
                      DeriveSeed(config.seed, "manifest:" + m.name));
        return EvaluateShift(shift, options);
      },
      [&](int i) { return ids[static_cast<size_t>(i)]; }, options.methods,
      threads);
}

void WriteSuiteOutputs(const SuiteResult& result,
                       const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create " + dir.string());
  {
    std::ofstream out(dir / "records.jsonl", std::ios::trunc);
    if (!out) Fail(ErrorKind::kIo, "cannot write records.jsonl");
    for (const auto& r : result.records) out << ToJson(r).dump() << '\n';
  }
  nlohmann::json summary = ToJson(result.summary);
  summary["failures"] = nlohmann::json::array();
  for (const auto& f : result.failures) {
    summary["failures"].push_back(
        {{"shift_id", f.shift_id}, {"kind", f.kind}, {"message", f.message}});
  }
  std::ofstream out(dir / "summary.json", std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write summary.json");
  out << summary.dump(2) << '\n';
}

}  // namespace dis2
