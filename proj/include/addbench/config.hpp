// include/addbench/config.hpp

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
#include <optional>
#include <string>
#include <vector>

#include "addbench/channel.hpp"
#include "addbench/codec.hpp"
#include "addbench/detector.hpp"
#include "addbench/features.hpp"

namespace addbench {

/// Flat `section.key -> value` view of an INI-style file. Keys before any
/// section header live in section "run".
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string &text, const std::string &origin = "<config>");
  static KeyValueConfig load(const std::filesystem::path &path);

  void set(const std::string &dotted_key, const std::string &value) { values_[dotted_key] = value; }
  std::optional<std::string> get(const std::string &dotted_key) const;
  const std::map<std::string, std::string> &values() const { return values_; }
  std::vector<std::string> sections() const;

 private:
  std::map<std::string, std::string> values_;
};

enum class DetectorKind { Gmm, Mlp };

struct RunConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::filesystem::path corpus_manifest;
  std::filesystem::path work_dir;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  FeatureKind feature = FeatureKind::Lfcc;

  std::size_t per_dataset = 500;

  std::vector<CodecSpec> codecs;
  std::map<std::string, ExternalCodecTemplate> external;  // by codec name
  unsigned codec_concurrency = 4;

  LossKind loss_kind = LossKind::Bernoulli;
  std::optional<GilbertElliottParams> ge;
  Concealment concealment = Concealment::ZeroFill;
  double frame_ms = 20.0;
  bool dump_masks = false;

  DetectorKind detector = DetectorKind::Gmm;
  GmmFitOptions gmm;
  std::size_t gmm_max_frames = 0;
  TrainConfig train;

  std::size_t demo_per_class = 20;

  /// Digest of the canonical key/value set, hex.
  std::string digest;
};

/// Builds and validates a RunConfig. Throws Error{BadConfig} for unknown
/// values, a missing seed, or out-of-range numbers.
RunConfig make_run_config(const KeyValueConfig &kv, const std::filesystem::path &base_dir);

std::string_view to_string(DetectorKind kind);

/// Canonical text of a config (sorted keys), the input of the digest.
std::string canonical_text(const KeyValueConfig &kv);

/// 16 hex digits of the stable hash of a byte string.
std::string hex_digest(std::string_view bytes);
/// hex_digest of a file's contents; throws Error{MissingFile}.
std::string file_digest(const std::filesystem::path &path);

}  // namespace addbench
