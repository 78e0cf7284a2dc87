// include/addbench/synth.hpp

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

#include "addbench/audio.hpp"
#include "addbench/corpus.hpp"

namespace addbench {

/// Synthetic stand-in corpus: source-filter "speech" where the bonafide
/// family carries pitch jitter, shimmer and breath noise, and the fake family
/// is perfectly periodic with broadened formants and a high-band vocoder
/// residue. Utterances are 3-5 s so fix_length sees both padding and cuts.
struct DemoCorpusOptions {
  std::size_t per_class = 20;
  std::vector<std::string> sources = {"FoR", "W&L", "M&M", "ASV"};
  std::size_t algorithms_per_source = 2;
  std::uint64_t seed = 1;
};

AudioBuffer synth_utterance(Label label, std::uint64_t seed);

/// Writes `dir/wav/<id>.wav` and `dir/manifest.csv`; returns the manifest.
/// Utterances are spread round-robin over the sources.
Manifest generate_demo_corpus(const std::filesystem::path &dir, const DemoCorpusOptions &opts);

}  // namespace addbench
