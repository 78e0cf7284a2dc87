// include/addbench/datasetgen.hpp

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

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "addbench/channel.hpp"
#include "addbench/codec.hpp"
#include "addbench/corpus.hpp"

namespace addbench {

inline constexpr int kConditionCount = 6;  // C0 clean + C1..C5

inline std::string condition_tag(int n) { return "C" + std::to_string(n); }

/// One utterance under one evaluation condition. C0 items have codec_index 0.
struct ConditionItem {
  std::string item_id;  // utt id for C0, "<utt>@<codec>" for C1..C5
  Utterance utterance;  // the clean source
  int condition = 0;
  int codec_index = 0;
  std::string codec_name;
  double plr = 0.0;
  std::uint64_t seed = 0;          // loss-mask sub-seed
  std::filesystem::path audio;     // rendered file, empty until materialized

  bool operator==(const ConditionItem &) const = default;
};

struct ConditionSet {
  std::vector<ConditionItem> c0;
  std::map<int, std::vector<ConditionItem>> conditions;  // 1..5
  std::map<int, double> plr_table;                       // 1..5
  std::set<std::string> consumed;                        // C0 utterance ids
  std::vector<CodecSpec> codecs;
  std::uint64_t seed = 0;

  /// Items of condition n (0 = clean).
  const std::vector<ConditionItem> &items(int n) const;
  std::vector<ConditionItem> &items(int n);
};

/// Selects `per_dataset` bonafide and `per_dataset` fake utterances from each
/// source tag (seeded uniform sample), then plans every C0 utterance under
/// every codec for each of C1..C5. Planning only; see render_condition_set.
/// Throws Error{InsufficientData}.
ConditionSet build_addc(const Manifest &manifest, std::size_t per_dataset, std::uint64_t seed,
                        const std::vector<CodecSpec> &codecs = default_registry());

/// Manifest with the consumed ids removed.
Manifest remove_consumed(const Manifest &manifest, const std::set<std::string> &consumed);

struct AugmentItem {
  std::string item_id;  // "<utt>@<codec>@p<plr basis points>"
  Utterance utterance;
  int subset = 0;  // 0..5, subset k is coded with codecs[k]
  int codec_index = 0;
  std::string codec_name;
  double plr = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path audio;

  bool operator==(const AugmentItem &) const = default;
};

struct AugmentPlan {
  std::vector<std::vector<std::string>> subsets;  // 6 disjoint id lists
  std::vector<CodecSpec> codecs;
  std::vector<double> plrs;
  std::vector<AugmentItem> items;
  std::uint64_t seed = 0;
  std::size_t input_size = 0;

  /// 5N: what the six-subset x five-PLR construction yields.
  std::size_t predicted_size() const { return plrs.size() * input_size; }
};

/// Stratified 6-way partition (strata = label x algorithm, round-robin after
/// a seeded shuffle); each subset rendered with its codec at every PLR.
/// Throws Error{EmptyCorpus}.
AugmentPlan build_augmented(const Manifest &training_pool, std::uint64_t seed,
                            const std::vector<CodecSpec> &codecs = default_registry());

/// Seeded, label-stratified split; `fraction` goes to the first part.
/// Throws Error{TooSmall} when a class has fewer than 2 items.
std::pair<Manifest, Manifest> split_train_val(const Manifest &dataset, double fraction, std::uint64_t seed);

struct RenderOptions {
  Concealment concealment = Concealment::ZeroFill;
  LossKind loss_kind = LossKind::Bernoulli;
  std::optional<GilbertElliottParams> ge;
  double frame_ms = 20.0;
  unsigned workers = 0;
  bool dump_masks = false;
  /// Per-codec external templates, keyed by codec name.
  std::map<std::string, ExternalCodecTemplate> external;
  bool force = false;  // re-render even if a valid file exists
};

/// The channel condition used for one planned item.
ChannelCondition item_condition(const CodecSpec &codec, double plr, std::uint64_t seed, const RenderOptions &opts);

/// Writes C0 copies and all degraded audio under `root/{C0..C5}/<codec>/`,
/// fills item.audio and writes `root/manifest.csv`. Existing outputs are kept
/// unless opts.force.
void render_condition_set(ConditionSet &set, const std::filesystem::path &root, const RenderOptions &opts);

/// Writes `root/<codec>/p<bp>/...` and `root/manifest.csv`.
void render_augmented(AugmentPlan &plan, const std::filesystem::path &root, const RenderOptions &opts);

/// plan.json round-trip for a rendered or planned condition set.
std::string condition_set_json(const ConditionSet &set, const std::map<std::string, std::string> &metadata = {});
ConditionSet load_condition_set(const std::filesystem::path &plan_json);

std::string augment_plan_json(const AugmentPlan &plan, const std::map<std::string, std::string> &metadata = {});

/// Canonical id of a codec directory ("AMR-WB" -> "amr-wb").
std::string codec_dir_name(const std::string &codec_name);

}  // namespace addbench
