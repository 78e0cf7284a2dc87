// include/addbench/channel.hpp

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
#include <optional>
#include <string>
#include <vector>

#include "addbench/audio.hpp"
#include "addbench/codec.hpp"

namespace addbench {

/// The five loss rates of the benchmark conditions C1..C5.
inline constexpr double kConditionPlr[5] = {0.0, 0.01, 0.05, 0.10, 0.20};

/// PLR for condition n in 1..5. Throws Error{BadParams} otherwise.
double plr_for_condition(int n);

struct PacketStream {
  std::vector<std::vector<std::int16_t>> packets;
  std::size_t packet_samples = 0;
  std::size_t tail_pad = 0;
  int sample_rate = kPipelineRate;
  std::optional<std::vector<bool>> loss_mask;

  std::size_t original_length() const { return packets.size() * packet_samples - tail_pad; }
};

enum class LossKind { Bernoulli, GilbertElliott };
enum class Concealment { ZeroFill, RepeatPrevious, LinearInterp };

std::string_view to_string(LossKind kind);
std::string_view to_string(Concealment strategy);
std::optional<LossKind> parse_loss_kind(std::string_view text);
std::optional<Concealment> parse_concealment(std::string_view text);

struct GilbertElliottParams {
  double p_good_to_bad = 0.0;
  double p_bad_to_good = 0.5;
};

struct LossModel {
  LossKind kind = LossKind::Bernoulli;
  double plr = 0.0;
  std::optional<GilbertElliottParams> ge;
  std::uint64_t seed = 0;
};

struct ChannelCondition {
  CodecSpec codec;
  LossModel loss;
  Concealment concealment = Concealment::ZeroFill;
  double frame_ms = 20.0;
  int condition_index = 0;  // 1..5 when the PLR follows the benchmark table
};

/// Splits into fixed packets of sample_rate * frame_ms / 1000 samples; the
/// last packet is zero-padded.
PacketStream packetize(const AudioBuffer &audio, double frame_ms = 20.0);

/// Inverse of packetize; ignores any loss mask.
AudioBuffer depacketize(const PacketStream &stream);

/// Bernoulli: packet i is lost iff counter_uniform(seed, i) < plr, so the mask
/// does not depend on evaluation order. Gilbert-Elliott: two-state chain whose
/// bad-state loss probability makes the stationary loss rate equal plr.
std::vector<bool> draw_loss_mask(std::size_t n_packets, const LossModel &model);

PacketStream apply_loss(PacketStream stream, const LossModel &model);

AudioBuffer conceal(const PacketStream &stream, Concealment strategy);

/// codec -> packetize -> loss -> concealment; output length equals input.
AudioBuffer transmit(const AudioBuffer &audio, const ChannelCondition &cond,
                     const ExternalCodecTemplate *tmpl = nullptr, const std::string &scratch_key = {});

/// The mask transmit() applies for this input length and condition.
std::vector<bool> transmit_loss_mask(std::size_t n_samples, const ChannelCondition &cond);

/// '1' for lost, '0' for received.
std::string mask_to_bits(const std::vector<bool> &mask);

}  // namespace addbench
