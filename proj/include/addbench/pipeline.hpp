// include/addbench/pipeline.hpp

// Copyright 2026  The addbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "addbench/config.hpp"

namespace addbench {

/// Training sets a detector can be fit on.
enum class TrainSet { Original, Augmented };
std::string_view to_string(TrainSet set);
std::optional<TrainSet> parse_train_set(std::string_view text);

/// Directory layout under RunConfig::work_dir.
struct Workspace {
  std::filesystem::path root;

  std::filesystem::path addc() const { return root / "addc"; }
  std::filesystem::path training_pool() const { return root / "addc" / "training_pool.csv"; }
  std::filesystem::path augmented() const { return root / "augmented"; }
  std::filesystem::path features(FeatureKind kind, const std::string &set) const;
  std::filesystem::path models() const { return root / "models"; }
  std::filesystem::path eval() const { return root / "eval"; }
  std::filesystem::path report() const { return root / "report"; }
};

struct StageResult {
  std::size_t written = 0;
  std::size_t skipped = 0;
  std::string summary;
};

/// Generates the synthetic corpus at the configured manifest location.
StageResult stage_demo(const RunConfig &cfg, bool force);
/// Selects and renders the six-condition test set; the rest of the corpus
/// becomes the training pool. Throws Error{StageInputMissing}.
StageResult stage_build_addc(const RunConfig &cfg, bool force);
/// Renders the 5x augmented training set from the training pool.
StageResult stage_augment(const RunConfig &cfg, bool force);
/// Extracts features for "original", "augmented" or "addc". Unchanged inputs
/// are cache hits and are not rewritten.
StageResult stage_features(const RunConfig &cfg, const std::string &set, bool force);
/// Fits the configured detector. Throws Error{StageInputMissing} or
/// Error{StaleCache} when the feature index no longer matches its manifest.
StageResult stage_train(const RunConfig &cfg, TrainSet set, bool force);
/// Scores every test item with the trained model (or takes `scores_csv`)
/// and writes scores plus report files.
StageResult stage_eval(const RunConfig &cfg, TrainSet set, bool force,
                       const std::optional<std::filesystem::path> &scores_csv = std::nullopt);
/// Merges every evaluation into report/summary.{json,txt}.
StageResult stage_report(const RunConfig &cfg);

/// demo (if the manifest is absent), build-addc, augment, features, train and
/// eval for both training sets, then report.
StageResult run_all(const RunConfig &cfg, bool force);

/// "<detector>_<feature>_<set>".
std::string model_name(const RunConfig &cfg, TrainSet set);

}  // namespace addbench
