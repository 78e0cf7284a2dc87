// include/addbench/corpus.hpp

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
#include <string>
#include <utility>
#include <vector>

#include "addbench/audio.hpp"

namespace addbench {

enum class Label { Bonafide, Fake };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

struct Utterance {
  std::string id;
  Label label = Label::Bonafide;
  std::string source_dataset;
  std::string algorithm;  // empty when untagged
  std::filesystem::path path;

  bool operator==(const Utterance &) const = default;
};

/// Validated list of utterances with cached per-(label, source) totals.
class Manifest {
 public:
  using CountKey = std::pair<Label, std::string>;

  Manifest() = default;
  /// Throws Error{DuplicateId} if two entries share an id.
  explicit Manifest(std::vector<Utterance> entries);

  const std::vector<Utterance> &entries() const { return entries_; }
  const std::map<CountKey, std::size_t> &counts() const { return counts_; }
  std::size_t count(Label label, const std::string &source) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Source tags in sorted order.
  std::vector<std::string> sources() const;

 private:
  std::vector<Utterance> entries_;
  std::map<CountKey, std::size_t> counts_;
};

/// Parses the `id,label,source_dataset,algorithm,path` CSV. Relative paths
/// are resolved against the manifest's directory.
Manifest load_manifest(const std::filesystem::path &path);

/// Writes a manifest CSV with paths relative to the manifest's directory, so
/// a workspace can be moved as a whole.
void write_manifest(const std::filesystem::path &path, const Manifest &manifest);

/// Windowed-sinc resampler (32-tap half-width at the lower of the two rates).
/// Output length is round(n * out_rate / in_rate).
std::vector<double> resample(const std::vector<double> &in, int in_rate, int out_rate);

/// Down-mix to mono by channel average, resample to 16 kHz, round and clamp.
/// Throws Error{EmptyAudio} or Error{UnsupportedRate}.
AudioBuffer normalize_audio(const RawAudio &raw);

/// Lifts a 16-bit buffer back into RawAudio (exact).
RawAudio to_raw(const AudioBuffer &audio);

/// Truncates to the first `length` samples or zero-pads at the tail.
AudioBuffer fix_length(const AudioBuffer &audio, std::size_t length = kUtteranceLength);

/// read_wave + normalize_audio + fix_length. Empty files become an all-zero
/// buffer and a warning is logged.
AudioBuffer load_utterance_audio(const std::filesystem::path &path,
                                 std::size_t length = kUtteranceLength);

}  // namespace addbench
