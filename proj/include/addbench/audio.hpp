// include/addbench/audio.hpp

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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace addbench {

inline constexpr int kPipelineRate = 16000;
inline constexpr std::size_t kUtteranceLength = 64000;  // 4 s at 16 kHz

/// Mono 16-bit PCM.
struct AudioBuffer {
  std::vector<std::int16_t> samples;
  int sample_rate = kPipelineRate;

  std::size_t size() const { return samples.size(); }
  bool operator==(const AudioBuffer &) const = default;
};

/// Decoded audio before normalization: interleaved frames, amplitudes in the
/// 16-bit integer scale regardless of the source bit depth.
struct RawAudio {
  std::vector<double> interleaved;
  int channels = 1;
  int sample_rate = kPipelineRate;

  std::size_t frames() const {
    return channels > 0 ? interleaved.size() / static_cast<std::size_t>(channels) : 0;
  }
};

/// Reads RIFF/WAVE integer PCM (8/16/24-bit, 1-2 channels, any rate).
/// Throws Error{MissingFile} or Error{BadWave}.
RawAudio read_wave(const std::filesystem::path &path);

/// Writes 16-bit PCM mono.
void write_wave(const std::filesystem::path &path, const AudioBuffer &audio);

/// Writes 16-bit PCM with arbitrary channel count; used by tools and tests
/// that need to emit non-pipeline formats.
void write_wave(const std::filesystem::path &path, std::span<const std::int16_t> interleaved,
                int channels, int sample_rate);

/// Encodes a 16-bit mono WAVE image in memory (same bytes write_wave emits).
std::vector<std::uint8_t> encode_wave(const AudioBuffer &audio);

/// Round half away from zero, saturating to the 16-bit range.
inline std::int16_t clamp_to_i16(double v) {
  if (!(v == v)) return 0;
  if (v >= 32767.0) return 32767;
  if (v <= -32768.0) return -32768;
  return static_cast<std::int16_t>(std::lround(v));
}

}  // namespace addbench
