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

// Shift manifests describe one source/target pair on disk:
//
//   {
//     "name": "living17-shift3",
//     "dim": 512,
//     "classes": 17,
//     "delta": 0.01,                       // optional
//     "splits": [
//       {"role": "source_train", "features_path": "s_train.bin",
//        "labels_path": "s_train.lbl", "logits_path": "s_train.logits"},
//       ...
//     ]
//   }
//
// Roles are source_train, source_val, target_train and target_val. Relative
// paths resolve against the manifest's directory. Target labels are optional
// and only ever read by the evaluation harness.

#ifndef DIS2_MANIFEST_H_
#define DIS2_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dis2/dataset.h"

namespace dis2 {

enum class SplitRole { kSourceTrain, kSourceVal, kTargetTrain, kTargetVal };

std::string_view SplitRoleName(SplitRole role);
std::optional<SplitRole> ParseSplitRole(std::string_view name);

struct SplitSpec {
  SplitRole role = SplitRole::kSourceTrain;
  std::filesystem::path features_path;
  std::optional<std::filesystem::path> labels_path;
  std::optional<std::filesystem::path> logits_path;
};

inline constexpr double kDefaultDelta = 0.01;

struct ShiftManifest {
  std::string name;
  int64_t dim = 0;
  int classes = 0;
  std::vector<SplitSpec> splits;
  double delta = kDefaultDelta;
  // Directory relative paths are resolved against. Not serialized.
  std::filesystem::path base_dir;

  const SplitSpec* Find(SplitRole role) const;
  bool Has(SplitRole role) const { return Find(role) != nullptr; }
  std::filesystem::path Resolve(const std::filesystem::path& p) const;
};

// Parses and validates a manifest, including the shapes of every referenced
// file. Errors name the offending field.
ShiftManifest LoadManifest(const std::filesystem::path& path);

void SaveManifest(const ShiftManifest& manifest,
                  const std::filesystem::path& path);

// Loads one split into memory. Throws kValidation if the role is absent.
EmbeddingDataset LoadSplit(const ShiftManifest& manifest, SplitRole role);

}  // namespace dis2

#endif  // DIS2_MANIFEST_H_
