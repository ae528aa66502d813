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

#include "dis2/manifest.h"

#include <fstream>

#include <nlohmann/json.hpp>

#include "dis2/error.h"

namespace dis2 {
namespace {

using nlohmann::json;

constexpr SplitRole kAllRoles[] = {SplitRole::kSourceTrain,
                                   SplitRole::kSourceVal,
                                   SplitRole::kTargetTrain,
                                   SplitRole::kTargetVal};

[[noreturn]] void SchemaError(const std::string& field,
                              const std::string& what) {
  Fail(ErrorKind::kValidation, "manifest field '" + field + "': " + what);
}

const json& Require(const json& obj, const std::string& key,
                    const std::string& prefix) {
  const auto it = obj.find(key);
  if (it == obj.end()) SchemaError(prefix + key, "missing");
  return *it;
}

std::string RequireString(const json& obj, const std::string& key,
                          const std::string& prefix) {
  const json& v = Require(obj, key, prefix);
  if (!v.is_string()) SchemaError(prefix + key, "expected a string");
  return v.get<std::string>();
}

int64_t RequirePositiveInt(const json& obj, const std::string& key) {
  const json& v = Require(obj, key, "");
  if (!v.is_number_integer() || v.get<int64_t>() <= 0) {
    SchemaError(key, "expected a positive integer");
  }
  return v.get<int64_t>();
}

std::optional<std::filesystem::path> OptionalPath(const json& obj,
                                                  const std::string& key,
                                                  const std::string& prefix) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) SchemaError(prefix + key, "expected a string");
  return std::filesystem::path(it->get<std::string>());
}

void CheckFiles(const ShiftManifest& m, const SplitSpec& split,
                const std::string& prefix) {
  auto must_exist = [&](const std::filesystem::path& p,
                        const std::string& field) {
    if (!std::filesystem::exists(m.Resolve(p))) {
      Fail(ErrorKind::kIo, "manifest field '" + prefix + field +
                               "': file not found: " + m.Resolve(p).string());
    }
  };
  auto shape_error = [&](const std::string& field, const std::string& what) {
    Fail(ErrorKind::kShape, "manifest field '" + prefix + field + "': " + what);
  };

  must_exist(split.features_path, "features_path");
  Shape features;
  try {
    features = ProbeMatrixShape(m.Resolve(split.features_path));
  } catch (const Error& e) {
    shape_error("features_path", e.what());
  }
  if (features.cols != m.dim) {
    shape_error("features_path", "has " + std::to_string(features.cols) +
                                     " columns but dim is " +
                                     std::to_string(m.dim));
  }
  if (split.labels_path) {
    must_exist(*split.labels_path, "labels_path");
    try {
      ReadLabels(m.Resolve(*split.labels_path), features.rows);
    } catch (const Error& e) {
      shape_error("labels_path", e.what());
    }
  }
  if (split.logits_path) {
    must_exist(*split.logits_path, "logits_path");
    Shape logits;
    try {
      logits = ProbeMatrixShape(m.Resolve(*split.logits_path));
    } catch (const Error& e) {
      shape_error("logits_path", e.what());
    }
    if (logits != Shape{features.rows, m.classes}) {
      shape_error("logits_path",
                  "is " + std::to_string(logits.rows) + "x" +
                      std::to_string(logits.cols) + ", expected " +
                      std::to_string(features.rows) + "x" +
                      std::to_string(m.classes));
    }
  }
}

}  // namespace

std::string_view SplitRoleName(SplitRole role) {
  switch (role) {
    case SplitRole::kSourceTrain:
      return "source_train";
    case SplitRole::kSourceVal:
      return "source_val";
    case SplitRole::kTargetTrain:
      return "target_train";
    case SplitRole::kTargetVal:
      return "target_val";
  }
  return "unknown";
}

std::optional<SplitRole> ParseSplitRole(std::string_view name) {
  for (SplitRole role : kAllRoles) {
    if (SplitRoleName(role) == name) return role;
  }
  return std::nullopt;
}

const SplitSpec* ShiftManifest::Find(SplitRole role) const {
  for (const auto& s : splits) {
    if (s.role == role) return &s;
  }
  return nullptr;
}

std::filesystem::path ShiftManifest::Resolve(
    const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

ShiftManifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    Fail(ErrorKind::kValidation,
         "manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) SchemaError("<root>", "expected an object");

  ShiftManifest m;
  m.base_dir = path.parent_path();
  m.name = RequireString(doc, "name", "");
  m.dim = RequirePositiveInt(doc, "dim");
  m.classes = static_cast<int>(RequirePositiveInt(doc, "classes"));
  if (const auto it = doc.find("delta"); it != doc.end()) {
    if (!it->is_number() || !(it->get<double>() > 0.0) ||
        !(it->get<double>() < 1.0)) {
      SchemaError("delta", "expected a number in (0, 1)");
    }
    m.delta = it->get<double>();
  }

  const json& splits = Require(doc, "splits", "");
  if (!splits.is_array()) SchemaError("splits", "expected an array");
  for (size_t i = 0; i < splits.size(); ++i) {
    const std::string prefix = "splits[" + std::to_string(i) + "].";
    const json& s = splits[i];
    if (!s.is_object()) SchemaError(prefix, "expected an object");
    SplitSpec spec;
    const std::string role = RequireString(s, "role", prefix);
    const auto parsed = ParseSplitRole(role);
    if (!parsed) SchemaError(prefix + "role", "unknown role '" + role + "'");
    if (m.Has(*parsed)) SchemaError(prefix + "role", "duplicate role " + role);
    spec.role = *parsed;
    spec.features_path = RequireString(s, "features_path", prefix);
    spec.labels_path = OptionalPath(s, "labels_path", prefix);
    spec.logits_path = OptionalPath(s, "logits_path", prefix);
    m.splits.push_back(std::move(spec));
  }
  for (SplitRole required : {SplitRole::kSourceTrain, SplitRole::kTargetTrain}) {
    if (!m.Has(required)) {
      SchemaError("splits", "required role absent: " +
                                std::string(SplitRoleName(required)));
    }
  }
  for (size_t i = 0; i < m.splits.size(); ++i) {
    CheckFiles(m, m.splits[i], "splits[" + std::to_string(i) + "].");
  }
  return m;
}

void SaveManifest(const ShiftManifest& manifest,
                  const std::filesystem::path& path) {
  json doc;
  doc["name"] = manifest.name;
  doc["dim"] = manifest.dim;
  doc["classes"] = manifest.classes;
  doc["delta"] = manifest.delta;
  json splits = json::array();
  for (const auto& s : manifest.splits) {
    json j;
    j["role"] = SplitRoleName(s.role);
    j["features_path"] = s.features_path.generic_string();
    if (s.labels_path) j["labels_path"] = s.labels_path->generic_string();
    if (s.logits_path) j["logits_path"] = s.logits_path->generic_string();
    splits.push_back(std::move(j));
  }
  doc["splits"] = std::move(splits);
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot create " + path.string());
  out << doc.dump(2) << '\n';
}

EmbeddingDataset LoadSplit(const ShiftManifest& manifest, SplitRole role) {
  const SplitSpec* spec = manifest.Find(role);
  if (!spec) {
    Fail(ErrorKind::kValidation, "manifest " + manifest.name + " has no " +
                                     std::string(SplitRoleName(role)) +
                                     " split");
  }
  EmbeddingDataset data;
  data.domain_tag = std::string(SplitRoleName(role));
  data.classes = manifest.classes;
  data.features = ReadMatrix(manifest.Resolve(spec->features_path));
  if (data.d() != manifest.dim) {
    Fail(ErrorKind::kShape, data.domain_tag + ": feature dim mismatch");
  }
  if (spec->labels_path) {
    data.labels = ReadLabels(manifest.Resolve(*spec->labels_path), data.n());
  }
  if (spec->logits_path) {
    data.logits = ReadMatrix(manifest.Resolve(*spec->logits_path),
                             Shape{data.n(), manifest.classes});
  }
  data.Validate();
  return data;
}

}  // namespace dis2
