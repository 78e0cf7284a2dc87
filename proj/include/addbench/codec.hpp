// include/addbench/codec.hpp

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
#include <vector>

#include "addbench/audio.hpp"

namespace addbench {

enum class CodecBackend { Builtin, External };

/// One codec operating point. For the six standard presets `index` is 1..6
/// and [min_kbps, max_kbps] is the codec's published bitrate range; user
/// codecs use index 0 and an open range.
struct CodecSpec {
  std::string name;
  int index = 0;
  double bandwidth_hz = 8000.0;
  double bitrate_kbps = 256.0;
  double frame_ms = 20.0;
  CodecBackend backend = CodecBackend::Builtin;
  double min_kbps = 0.0;
  double max_kbps = 0.0;  // 0 = unbounded

  bool operator==(const CodecSpec &) const = default;
};

/// Throws Error{BadSpec} when an invariant is violated.
void validate(const CodecSpec &spec);

/// The six presets, ordered by index: AMR-WB, EVS, IVAS, OPUS, SpeexWB, SILK.
std::vector<CodecSpec> default_registry();

/// Transparent builtin codec (full band, quantizer bypassed).
CodecSpec identity_codec();

/// Case-insensitive lookup among the presets plus "identity"; accepts
/// "amr-wb"/"amrwb", "speex"/"speexwb" and the 1-based index as text.
std::optional<CodecSpec> find_codec(std::string_view name);

/// Bits per sample for the companded quantizer, floor of
/// clamp(bitrate * frame / samples_per_frame, 2, 15).
int quantizer_bits(const CodecSpec &spec, int sample_rate = kPipelineRate);

/// Parametric codec surrogate: linear-phase band-limit, frame-wise mu-law
/// (mu = 255) quantization with a per-frame peak gain, decoder-side band-limit
/// and per-frame energy cap. Deterministic; output length equals input length.
/// At 15 bits the quantizer is bypassed. Each frame keeps the closest of the
/// reconstructions at 2..b bits.
AudioBuffer simulate_codec(const AudioBuffer &audio, const CodecSpec &spec);

struct ExternalCodecTemplate {
  std::string encode_cmd;  // placeholders: {in} {out} {bitrate}
  std::string decode_cmd;
  std::filesystem::path work_dir;

  bool operator==(const ExternalCodecTemplate &) const = default;
};

/// Throws Error{BadSpec} unless each command holds {in} and {out} exactly once.
void validate(const ExternalCodecTemplate &tmpl);

/// Upper bound on simultaneously running codec subprocesses (default 4).
void set_external_codec_concurrency(unsigned cap);

/// encode -> decode through external executables. The executable search path
/// is ADDBENCH_CODEC_PATH followed by PATH. `scratch_key` names the scratch
/// files; concurrent calls must pass distinct keys (the utterance id).
AudioBuffer external_codec_roundtrip(const AudioBuffer &audio, const CodecSpec &spec,
                                     const ExternalCodecTemplate &tmpl,
                                     const std::string &scratch_key = {});

AudioBuffer apply_codec(const AudioBuffer &audio, const CodecSpec &spec,
                        const ExternalCodecTemplate *tmpl = nullptr,
                        const std::string &scratch_key = {});

}  // namespace addbench
