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

// dis2: error bounds and accuracy estimates for a classifier under shift.
//
//   dis2 synth      --out DIR                  write a synthetic shift manifest
//   dis2 bound      --manifest M               train critics, print the bound
//   dis2 estimate   --manifest M               baseline estimates, JSON lines
//   dis2 sweep-pcs  --manifest M               bounds over top-PC reductions
//   dis2 evaluate   --synth-shifts N | M...    benchmark records and summary
//   dis2 calibrate  --records FILE             leave-one-group-out adjustment
//
// Exit codes: 0 success, 1 validation error, 2 some shifts failed.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dis2/baselines.h"
#include "dis2/bound.h"
#include "dis2/error.h"
#include "dis2/loocv.h"
#include "dis2/manifest.h"
#include "dis2/reduction.h"
#include "dis2/seed.h"
#include "dis2/serialize.h"
#include "dis2/shift.h"
#include "dis2/suite.h"
#include "dis2/synth.h"

namespace {

using dis2::ErrorKind;
using dis2::Fail;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

struct GlobalFlags {
  double delta = dis2::kDefaultDelta;
  uint64_t seed = 0;
  double holdout_fraction = 0.2;
  std::string input_space = "features";
  int pc_divisor = 1;
  std::string out;
};

struct ClassifierFlags {
  std::string head_weights;
  std::string head_bias;
  bool raw_logits = false;

  void Register(CLI::App* cmd) {
    cmd->add_option("--head-weights", head_weights,
                    "C x d weights of the classifier under test");
    cmd->add_option("--head-bias", head_bias, "1 x C bias");
    cmd->add_flag("--raw-logits", raw_logits,
                  "use logits stored in the manifest instead of a head");
  }

  dis2::ClassifierUnderTest Build() const {
    if (raw_logits) {
      if (!head_weights.empty()) {
        Fail(ErrorKind::kValidation,
             "--raw-logits conflicts with --head-weights");
      }
      return dis2::ClassifierUnderTest::FromLogits();
    }
    if (head_weights.empty() || head_bias.empty()) {
      Fail(ErrorKind::kValidation,
           "pass --head-weights and --head-bias, or --raw-logits");
    }
    return dis2::ClassifierUnderTest::FromHead(
        dis2::LoadLinearHead(head_weights, head_bias));
  }
};

dis2::InputSpaceKind ParseSpace(const std::string& s) {
  if (s == "features") return dis2::InputSpaceKind::kFeatures;
  if (s == "logits") return dis2::InputSpaceKind::kLogits;
  if (s == "pcs") return dis2::InputSpaceKind::kTopPcs;
  Fail(ErrorKind::kValidation, "unknown input space " + s);
}

std::vector<dis2::Method> ParseMethods(const std::vector<std::string>& names) {
  std::vector<dis2::Method> out;
  for (const auto& n : names) {
    const auto m = dis2::ParseMethod(n);
    if (!m) Fail(ErrorKind::kValidation, "unknown method " + n);
    out.push_back(*m);
  }
  return out;
}

void Emit(const GlobalFlags& g, const std::string& file,
          const nlohmann::json& doc) {
  if (g.out.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  fs::create_directories(g.out);
  std::ofstream out(fs::path(g.out) / file, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + file);
  out << doc.dump(2) << '\n';
}

dis2::ShiftInputs LoadForCommand(const GlobalFlags& g,
                                 const std::string& manifest,
                                 const ClassifierFlags& c) {
  const dis2::ShiftManifest m = dis2::LoadManifest(manifest);
  return dis2::LoadShift(m, c.Build(), g.holdout_fraction,
                         dis2::DeriveSeed(g.seed, "manifest:" + m.name));
}

// Critic input space and optional basis for a single-shift command.
std::pair<dis2::InputSpace, std::optional<dis2::PcaBasis>> SpaceFor(
    const GlobalFlags& g, const dis2::ShiftInputs& shift) {
  dis2::InputSpace space{ParseSpace(g.input_space), 0};
  std::optional<dis2::PcaBasis> basis;
  if (space.kind == dis2::InputSpaceKind::kTopPcs) {
    if (g.pc_divisor < 1) Fail(ErrorKind::kValidation, "--pc-divisor must be >= 1");
    dis2::Matrix pooled(shift.source_train.n() + shift.target_train.n(),
                        shift.source_train.d());
    pooled << shift.source_train.features, shift.target_train.features;
    const dis2::PcaBasis full = dis2::FitPca(pooled);
    space.dim = std::max<int64_t>(1, full.input_dim() / g.pc_divisor);
    basis = full.Truncate(space.dim);
  }
  return {space, basis};
}

int RunSynth(const GlobalFlags& g, dis2::SynthConfig config,
             const std::vector<double>& weights) {
  if (g.out.empty()) Fail(ErrorKind::kValidation, "synth requires --out");
  config.seed = g.seed;
  config.class_weights = weights;
  auto [source, target] = dis2::GenerateSyntheticShift(config);
  auto [s_train, s_val] = dis2::SplitHoldout(
      source, g.holdout_fraction, dis2::DeriveSeed(g.seed, "source_val"));
  auto [t_train, t_val] = dis2::SplitHoldout(
      target, g.holdout_fraction, dis2::DeriveSeed(g.seed, "target_val"));
  const dis2::LinearHead head = dis2::FitLinearProbe(s_train);

  const fs::path dir(g.out);
  fs::create_directories(dir);
  dis2::SaveLinearHead(head, dir / "head.weights", dir / "head.bias");
  dis2::ShiftManifest manifest;
  manifest.name = "synth-" + std::to_string(g.seed);
  manifest.dim = config.dim;
  manifest.classes = config.classes;
  manifest.delta = g.delta;
  const std::pair<dis2::SplitRole, const dis2::EmbeddingDataset*> parts[] = {
      {dis2::SplitRole::kSourceTrain, &s_train},
      {dis2::SplitRole::kSourceVal, &s_val},
      {dis2::SplitRole::kTargetTrain, &t_train},
      {dis2::SplitRole::kTargetVal, &t_val}};
  for (const auto& [role, data] : parts) {
    const std::string name(dis2::SplitRoleName(role));
    dis2::SplitSpec spec;
    spec.role = role;
    spec.features_path = name + ".features";
    spec.labels_path = name + ".labels";
    spec.logits_path = name + ".logits";
    dis2::WriteMatrix(dir / spec.features_path, data->features);
    dis2::WriteLabels(dir / *spec.labels_path, *data->labels);
    dis2::WriteMatrix(dir / *spec.logits_path, head.Apply(data->features));
    manifest.splits.push_back(spec);
  }
  dis2::SaveManifest(manifest, dir / "manifest.json");
  std::cout << "wrote " << (dir / "manifest.json").string() << '\n';
  return kExitOk;
}

int RunBound(const GlobalFlags& g, const std::string& manifest,
             const ClassifierFlags& c, const std::string& loss) {
  const auto variant = dis2::ParseLossVariant(loss);
  if (!variant) Fail(ErrorKind::kValidation, "unknown loss " + loss);
  const dis2::ShiftInputs shift = LoadForCommand(g, manifest, c);
  const auto [space, basis] = SpaceFor(g, shift);
  const auto grid = dis2::DefaultSearchGrid(*variant);
  const dis2::Dis2Result r = dis2::EvaluateDis2(shift, space, grid, g.delta,
                                                basis ? &*basis : nullptr);
  std::cout << shift.id << ": " << dis2::RenderBound(r.report) << '\n';
  nlohmann::json doc = dis2::ToJson(r.report);
  doc["shift_id"] = shift.id;
  doc["input_space"] = r.space.ToString();
  doc["validity_score"] = r.validity_score;
  doc["selected_config"] = dis2::ToJson(r.search.selected().config);
  if (shift.target_val.labels) {
    const double err = dis2::ErrorRate(shift.classifier.Predict(shift.target_val),
                                       *shift.target_val.labels);
    doc["certificate"] =
        dis2::CertificateName(dis2::AssumptionCertificate(r.report, err));
  }
  if (!g.out.empty()) {
    Emit(g, "bound.json", doc);
    dis2::SaveCritic(r.search.selected(), fs::path(g.out) / "critic");
  }
  return kExitOk;
}

int RunEstimate(const GlobalFlags& g, const std::string& manifest,
                const ClassifierFlags& c, const std::vector<std::string>& names) {
  const dis2::ShiftInputs shift = LoadForCommand(g, manifest, c);
  if (!shift.source_val.labels) {
    Fail(ErrorKind::kValidation, "source_val needs labels");
  }
  const auto methods = ParseMethods(names);
  const dis2::Labels& labels = *shift.source_val.labels;
  const dis2::Matrix s_logits = shift.classifier.Logits(shift.source_val);
  const dis2::Matrix t_logits = shift.classifier.Logits(shift.target_val);
  const dis2::TemperatureScaler scaler = dis2::FitTemperature(s_logits, labels);
  std::vector<nlohmann::json> lines;
  for (dis2::Method m : methods) {
    dis2::ErrorEstimate e;
    switch (m) {
      case dis2::Method::kAc:
        e = dis2::AcEstimate(t_logits, scaler);
        break;
      case dis2::Method::kDoc:
        e = dis2::DocEstimate(s_logits, labels, t_logits, scaler);
        break;
      case dis2::Method::kAtcNe:
        e = dis2::AtcEstimate(s_logits, labels, t_logits,
                              dis2::AtcScore::kNegEntropy, scaler);
        break;
      case dis2::Method::kAtcMc:
        e = dis2::AtcEstimate(s_logits, labels, t_logits,
                              dis2::AtcScore::kMaxConfidence, scaler);
        break;
      case dis2::Method::kCot:
        e = dis2::CotEstimate(
            labels, t_logits, scaler,
            dis2::DefaultCotSolver(t_logits.rows(), s_logits.rows()),
            dis2::DeriveSeed(g.seed, "cot:" + shift.id));
        break;
      default:
        Fail(ErrorKind::kValidation, std::string(dis2::MethodName(m)) +
                                         " is not a baseline; use 'bound'");
    }
    nlohmann::json j = dis2::ToJson(e);
    j["shift_id"] = shift.id;
    lines.push_back(std::move(j));
  }
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    file.open(fs::path(g.out) / "estimates.jsonl", std::ios::trunc);
    if (!file) Fail(ErrorKind::kIo, "cannot write estimates.jsonl");
    out = &file;
  }
  for (const auto& j : lines) *out << j.dump() << '\n';
  return kExitOk;
}

int RunSweep(const GlobalFlags& g, const std::string& manifest,
             const ClassifierFlags& c, const std::vector<int>& k_list,
             std::optional<double> threshold) {
  const dis2::ShiftInputs shift = LoadForCommand(g, manifest, c);
  const auto grid = dis2::DefaultSearchGrid();
  const dis2::SweepResult r =
      dis2::SweepPcs(shift, k_list, grid, g.delta, threshold);
  for (const auto& rec : r.records) {
    std::printf("k=%-4d p=%-5lld score=%.4f %s\n", rec.k,
                static_cast<long long>(rec.p), rec.validity_score,
                dis2::RenderBound(rec.bound).c_str());
  }
  Emit(g, "sweep.json", dis2::ToJson(r));
  return kExitOk;
}

int RunEvaluate(const GlobalFlags& g, int synth_shifts,
                const std::vector<std::string>& manifests,
                const ClassifierFlags& c, const std::vector<std::string>& names,
                int threads, bool holdout_set) {
  dis2::EvalOptions options;
  options.methods = ParseMethods(names);
  options.delta = g.delta;
  options.space = ParseSpace(g.input_space);
  options.pc_divisor = g.pc_divisor;
  options.seed = g.seed;
  dis2::SuiteResult result;
  if (synth_shifts > 0) {
    if (!manifests.empty()) {
      Fail(ErrorKind::kValidation, "--synth-shifts conflicts with manifests");
    }
    dis2::SynthSuiteConfig suite;
    suite.seed = g.seed;
    suite.shifts = synth_shifts;
    if (holdout_set) suite.holdout_fraction = g.holdout_fraction;
    result = dis2::RunSynthSuite(suite, options, threads);
  } else {
    if (manifests.empty()) {
      Fail(ErrorKind::kValidation, "pass --synth-shifts or manifest paths");
    }
    dis2::ManifestSuiteConfig suite;
    for (const auto& m : manifests) suite.manifests.emplace_back(m);
    suite.classifier = c.Build();
    suite.holdout_fraction = g.holdout_fraction;
    suite.seed = g.seed;
    result = dis2::RunManifestSuite(suite, options, threads);
  }
  if (!g.out.empty()) dis2::WriteSuiteOutputs(result, g.out);
  for (const auto& m : result.summary.methods) {
    std::printf("%-14s n=%-5lld mae=%.4f coverage=%.4f overest=%.4f\n",
                std::string(dis2::MethodName(m.method)).c_str(),
                static_cast<long long>(m.count), m.mae, m.coverage,
                m.conditional_overestimation);
  }
  for (const auto& f : result.failures) {
    std::fprintf(stderr, "shift %s failed [%s]: %s\n", f.shift_id.c_str(),
                 f.kind.c_str(), f.message.c_str());
  }
  return result.failures.empty() ? kExitOk : kExitPartial;
}

int RunCalibrate(const GlobalFlags& g, const std::string& records_path,
                 const std::string& method_name, double alpha,
                 const std::string& mode_name) {
  const auto method = dis2::ParseMethod(method_name);
  if (!method) Fail(ErrorKind::kValidation, "unknown method " + method_name);
  const auto mode = dis2::ParseAdjustmentMode(mode_name);
  if (!mode) Fail(ErrorKind::kValidation, "unknown mode " + mode_name);
  std::ifstream in(records_path);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + records_path);
  std::vector<dis2::EvaluationRecord> records;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(
          dis2::EvaluationRecordFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorKind::kValidation, records_path + ":" +
                                       std::to_string(line_no) + ": " + e.what());
    }
  }
  const dis2::LoocvResult r = dis2::LoocvAdjust(records, *method, alpha, *mode);
  for (const auto& f : r.folds) {
    std::printf("held out %-8s %s=%.6f%s train_cov=%.4f held_out_cov=%.4f\n",
                f.held_out.c_str(), mode_name.c_str(), f.params.value,
                f.params.saturated ? " [saturated]" : "", f.training_coverage,
                f.held_out_coverage);
  }
  Emit(g, "calibration.json", dis2::ToJson(r));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error bounds and accuracy estimates under distribution shift"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  bool holdout_set = false;
  app.add_option("--delta", g.delta, "confidence parameter")
      ->check(CLI::Range(1e-12, 1.0));
  app.add_option("--seed", g.seed, "run seed");
  app.add_option_function<double>(
         "--holdout-fraction",
         [&](double v) {
           g.holdout_fraction = v;
           holdout_set = true;
         },
         "fraction carved out for missing validation splits")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--input-space", g.input_space, "critic input space")
      ->check(CLI::IsMember({"features", "logits", "pcs"}));
  app.add_option("--pc-divisor", g.pc_divisor,
                 "with pcs: keep max(1, d / k) components");
  app.add_option("--out", g.out, "output directory");

  std::function<int()> action;
  ClassifierFlags classifier;
  std::string manifest;

  dis2::SynthConfig synth;
  std::vector<double> weights;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic shift");
  synth_cmd->add_option("--classes", synth.classes);
  synth_cmd->add_option("--dim", synth.dim);
  synth_cmd->add_option("--source-per-class", synth.source_per_class);
  synth_cmd->add_option("--target-total", synth.target_total);
  synth_cmd->add_option("--separation", synth.separation);
  synth_cmd->add_option("--shift-scale", synth.shift_scale);
  synth_cmd->add_option("--rotation", synth.rotation_angle, "radians");
  synth_cmd->add_option("--noise", synth.noise);
  synth_cmd->add_option("--weights", weights, "target class proportions");
  synth_cmd->callback([&] { action = [&] { return RunSynth(g, synth, weights); }; });

  std::string loss = "dis";
  auto* bound_cmd = app.add_subcommand("bound", "critic search and bound");
  bound_cmd->add_option("--manifest", manifest)->required();
  bound_cmd->add_option("--loss", loss, "dis, dbat or neg_xent");
  classifier.Register(bound_cmd);
  bound_cmd->callback(
      [&] { action = [&] { return RunBound(g, manifest, classifier, loss); }; });

  std::vector<std::string> methods = {"AC", "DoC", "ATC_NE", "ATC_MC", "COT"};
  auto* estimate_cmd = app.add_subcommand("estimate", "baseline estimates");
  estimate_cmd->add_option("--manifest", manifest)->required();
  estimate_cmd->add_option("--methods", methods);
  classifier.Register(estimate_cmd);
  estimate_cmd->callback([&] {
    action = [&] { return RunEstimate(g, manifest, classifier, methods); };
  });

  std::vector<int> k_list = dis2::kDefaultPcDivisors;
  std::optional<double> threshold;
  auto* sweep_cmd = app.add_subcommand("sweep-pcs", "bounds over top-PC sets");
  sweep_cmd->add_option("--manifest", manifest)->required();
  sweep_cmd->add_option("--k", k_list, "divisors of the feature dimension");
  sweep_cmd->add_option("--score-threshold", threshold);
  classifier.Register(sweep_cmd);
  sweep_cmd->callback([&] {
    action = [&] { return RunSweep(g, manifest, classifier, k_list, threshold); };
  });

  int synth_shifts = 0;
  int threads = 1;
  std::vector<std::string> manifests;
  std::vector<std::string> eval_methods = {"AC",  "DoC",  "ATC_NE",       "ATC_MC",
                                           "COT", "DIS2", "DIS2_NO_DELTA"};
  auto* eval_cmd = app.add_subcommand("evaluate", "benchmark a suite");
  eval_cmd->add_option("--synth-shifts", synth_shifts,
                       "run the seeded synthetic suite with N shifts");
  eval_cmd->add_option("manifests", manifests, "manifest files");
  eval_cmd->add_option("--methods", eval_methods);
  eval_cmd->add_option("--threads", threads, "0 = all cores");
  classifier.Register(eval_cmd);
  eval_cmd->callback([&] {
    action = [&] {
      return RunEvaluate(g, synth_shifts, manifests, classifier, eval_methods,
                         threads, holdout_set);
    };
  });

  std::string records_path, method_name = "ATC_NE", mode_name = "shift";
  double alpha = 0.95;
  auto* cal_cmd = app.add_subcommand("calibrate", "LOOCV adjustment");
  cal_cmd->add_option("--records", records_path, "records.jsonl")->required();
  cal_cmd->add_option("--method", method_name);
  cal_cmd->add_option("--alpha", alpha)->check(CLI::Range(0.0, 1.0));
  cal_cmd->add_option("--mode", mode_name)
      ->check(CLI::IsMember({"shift", "scale"}));
  cal_cmd->callback([&] {
    action = [&] {
      return RunCalibrate(g, records_path, method_name, alpha, mode_name);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }
  try {
    return action();
  } catch (const dis2::Error& e) {
    std::cerr << "error [" << dis2::ErrorKindName(e.kind()) << "]: " << e.what()
              << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}
