// include/addbench/features.hpp

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
#include <span>
#include <string>
#include <vector>

#include "addbench/audio.hpp"

namespace addbench {

enum class FeatureKind : std::uint32_t { Lfcc = 1, Cqcc = 2, Raw = 3 };

std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> parse_feature_kind(std::string_view text);

/// D x T matrix, row-major (row = feature dimension, column = frame).
struct FeatureMatrix {
  FeatureKind kind = FeatureKind::Lfcc;
  std::size_t dim = 0;
  std::size_t frames = 0;
  std::vector<double> data;

  FeatureMatrix() = default;
  FeatureMatrix(FeatureKind k, std::size_t d, std::size_t t) : kind(k), dim(d), frames(t), data(d * t, 0.0) {}

  double &at(std::size_t d, std::size_t t) { return data[d * frames + t]; }
  double at(std::size_t d, std::size_t t) const { return data[d * frames + t]; }
  std::span<const double> row(std::size_t d) const { return {data.data() + d * frames, frames}; }
  /// Frame t as a D-vector.
  std::vector<double> column(std::size_t t) const;

  bool operator==(const FeatureMatrix &) const = default;
};

struct FrameGrid {
  std::size_t window_len = 1024;
  std::size_t hop = 512;

  std::size_t n_frames(std::size_t length) const { return 1 + length / hop; }
};

inline constexpr FrameGrid kLfccGrid{1024, 512};
inline constexpr FrameGrid kCqccGrid{512, 128};

inline constexpr std::size_t kStaticCoeffs = 20;
inline constexpr std::size_t kLfccFilters = 40;
inline constexpr std::size_t kCqtBinsPerOctave = 12;
inline constexpr std::size_t kCqtOctaves = 9;
inline constexpr std::size_t kCqtBins = kCqtBinsPerOctave * kCqtOctaves;
inline constexpr double kCqtMinHz = 15.625;  // 8000 / 2^9
inline constexpr std::size_t kCqccUniformPoints = 128;
inline constexpr double kLogFloor = 1e-10;

/// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect_index(long long i, std::size_t n);

/// Hamming-windowed frames centered at t * hop, reflect-padded at the edges.
/// Throws Error{BadGrid}.
std::vector<std::vector<double>> frame_signal(const AudioBuffer &audio, const FrameGrid &grid);

/// Triangular filter weights (kLfccFilters x 513) on the 1024-point FFT grid,
/// filters spaced linearly over 0..8000 Hz.
const std::vector<std::vector<double>> &lfcc_filterbank();
/// Center frequency of each linear filter in Hz.
std::vector<double> lfcc_filter_centers();
/// Linear filterbank energies, kLfccFilters x 126 (before the log).
FeatureMatrix lfcc_filterbank_energies(const AudioBuffer &audio);

/// 60 x 126: 20 static cepstra (C0 kept) + deltas + delta-deltas.
FeatureMatrix lfcc(const AudioBuffer &audio);

std::vector<double> cqt_bin_frequencies();
/// Constant-Q power spectrogram, kCqtBins x 501.
FeatureMatrix constant_q_power(const AudioBuffer &audio);

/// 60 x 501: log CQT power, resampled to a uniform frequency axis, DCT.
FeatureMatrix cqcc(const AudioBuffer &audio);

/// Stacks [static; delta; delta-delta] using a +/-2 frame regression with
/// edge replication.
FeatureMatrix deltas(const FeatureMatrix &static_coeffs);

/// 1 x 64000, samples / 32768.
FeatureMatrix raw_view(const AudioBuffer &audio);

FeatureMatrix extract_features(FeatureKind kind, const AudioBuffer &audio);

/// Per-row mean followed by per-row population standard deviation.
std::vector<double> pool_stats(const FeatureMatrix &f);

/// Cache file: "ADDF", kind, D, T as little-endian u32, then D*T f32 row-major.
void write_feature_file(const std::filesystem::path &path, const FeatureMatrix &f);
FeatureMatrix read_feature_file(const std::filesystem::path &path);
/// Cheap header check used for cache-hit decisions.
bool feature_file_valid(const std::filesystem::path &path, FeatureKind expected);

}  // namespace addbench
