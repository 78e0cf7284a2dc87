// include/addbench/evaluation.hpp

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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "addbench/corpus.hpp"
#include "addbench/datasetgen.hpp"

namespace addbench {

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  double fnr = 0.0;
  double fpr = 0.0;
  /// eer > 0.5: the detector ranks fakes above bonafide.
  bool inverted = false;
};

/// Sweeps every distinct score as threshold t. FNR(t) = bonafide below t,
/// FPR(t) = fake at or above t. Picks the t minimizing |FNR - FPR|, then
/// FNR + FPR, then t. Throws Error{OneClassOnly}.
EerResult eer(std::span<const double> scores, std::span<const Label> labels);

/// Mann-Whitney AUC with midranks: P(bonafide > fake) + P(tie) / 2.
double auc(std::span<const double> scores, std::span<const Label> labels);

/// Positive class = fake, predicted when score < threshold.
double f1(std::span<const double> scores, std::span<const Label> labels, double threshold);

struct ScoreEntry {
  std::string item_id;
  std::string condition;  // "C0".."C5"
  double score = 0.0;
  Label label = Label::Bonafide;

  bool operator==(const ScoreEntry &) const = default;
};

using ScoreSet = std::vector<ScoreEntry>;

/// CSV `utterance_id,condition,score,label`; scores with 17 significant digits.
void write_score_file(const std::filesystem::path &path, const ScoreSet &scores);
ScoreSet read_score_file(const std::filesystem::path &path);

struct ConditionMetrics {
  std::string tag;
  double eer = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;
  std::size_t n_bonafide = 0;
  std::size_t n_fake = 0;
  bool inverted = false;
};

ConditionMetrics compute_metrics(const std::string &tag, std::span<const double> scores,
                                 std::span<const Label> labels);

struct MetricDelta {
  double eer = 0.0;
  double auc = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  std::vector<ConditionMetrics> conditions;                            // C0..C5 in order
  std::map<std::string, std::vector<ConditionMetrics>> per_codec;      // codec -> C1..C5
  std::map<std::string, MetricDelta> deltas;                           // "C1".."C5" minus C0
  /// C0 -> C1 degradation (C1 - C0) for EER, C0 - C1 for AUC and F1, so a
  /// positive number always means worse.
  MetricDelta c0_to_c1_degradation;
  std::map<std::string, std::string> metadata;

  const ConditionMetrics &condition(const std::string &tag) const;
};

/// Throws Error{MissingScores} listing any (item, condition) without a score.
EvalReport evaluate_conditions(const ScoreSet &scores, const ConditionSet &set,
                               std::map<std::string, std::string> metadata = {});

/// Machine-readable report (JSON), aligned text, and per-condition CSV.
std::string report_json(const EvalReport &report);
std::string report_text(const EvalReport &report);
std::string report_csv(const EvalReport &report);

}  // namespace addbench
