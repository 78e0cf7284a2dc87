// src/channel.cpp

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

#include "addbench/channel.hpp"

#include <algorithm>
#include <cmath>

#include "addbench/error.hpp"
#include "addbench/rng.hpp"

namespace addbench {

namespace {

std::size_t packet_size(int rate, double frame_ms) {
  if (!(frame_ms > 0.0)) throw Error(ErrorCode::BadFrame, "frame_ms must be > 0");
  auto n = static_cast<std::size_t>(std::llround(rate * frame_ms / 1000.0));
  if (n == 0) throw Error(ErrorCode::BadFrame, "frame shorter than one sample");
  return n;
}

// Second stream for the Gilbert-Elliott state transitions.
constexpr std::uint64_t kStateStream = 0x5bd1e9955bd1e995ULL;

}  // namespace

double plr_for_condition(int n) {
  if (n < 1 || n > 5) throw Error(ErrorCode::BadParams, "condition index must be 1..5");
  return kConditionPlr[n - 1];
}

std::string_view to_string(LossKind kind) {
  return kind == LossKind::Bernoulli ? "bernoulli" : "gilbert_elliott";
}

std::string_view to_string(Concealment s) {
  switch (s) {
    case Concealment::ZeroFill: return "zero_fill";
    case Concealment::RepeatPrevious: return "repeat_previous";
    case Concealment::LinearInterp: return "linear_interp";
  }
  return "zero_fill";
}

std::optional<LossKind> parse_loss_kind(std::string_view t) {
  if (t == "bernoulli") return LossKind::Bernoulli;
  if (t == "gilbert_elliott" || t == "ge") return LossKind::GilbertElliott;
  return std::nullopt;
}

std::optional<Concealment> parse_concealment(std::string_view t) {
  if (t == "zero_fill") return Concealment::ZeroFill;
  if (t == "repeat_previous") return Concealment::RepeatPrevious;
  if (t == "linear_interp") return Concealment::LinearInterp;
  return std::nullopt;
}

PacketStream packetize(const AudioBuffer &audio, double frame_ms) {
  PacketStream s;
  s.sample_rate = audio.sample_rate;
  s.packet_samples = packet_size(audio.sample_rate, frame_ms);
  const std::size_t n = audio.samples.size();
  const std::size_t n_packets = (n + s.packet_samples - 1) / s.packet_samples;
  s.tail_pad = n_packets * s.packet_samples - n;
  s.packets.assign(n_packets, std::vector<std::int16_t>(s.packet_samples, 0));
  for (std::size_t p = 0; p < n_packets; ++p) {
    const std::size_t begin = p * s.packet_samples;
    const std::size_t end = std::min(n, begin + s.packet_samples);
    std::copy(audio.samples.begin() + static_cast<long>(begin), audio.samples.begin() + static_cast<long>(end),
              s.packets[p].begin());
  }
  return s;
}

AudioBuffer depacketize(const PacketStream &stream) {
  AudioBuffer out;
  out.sample_rate = stream.sample_rate;
  out.samples.reserve(stream.packets.size() * stream.packet_samples);
  for (const auto &p : stream.packets) out.samples.insert(out.samples.end(), p.begin(), p.end());
  out.samples.resize(stream.original_length());
  return out;
}

std::vector<bool> draw_loss_mask(std::size_t n_packets, const LossModel &model) {
  if (!(model.plr >= 0.0 && model.plr <= 1.0)) throw Error(ErrorCode::BadParams, "plr must be in [0, 1]");
  std::vector<bool> mask(n_packets, false);
  if (model.kind == LossKind::Bernoulli) {
    for (std::size_t i = 0; i < n_packets; ++i) mask[i] = counter_uniform(model.seed, i) < model.plr;
    return mask;
  }

  GilbertElliottParams ge;
  if (model.ge) {
    ge = *model.ge;
  } else if (model.plr < 1.0) {
    // Mean burst of 2 packets, every bad-state packet lost.
    ge.p_bad_to_good = 0.5;
    ge.p_good_to_bad = model.plr * ge.p_bad_to_good / (1.0 - model.plr);
  } else {
    ge = {1.0, 0.0};
  }
  if (!(ge.p_good_to_bad >= 0.0 && ge.p_good_to_bad <= 1.0 && ge.p_bad_to_good >= 0.0 && ge.p_bad_to_good <= 1.0))
    throw Error(ErrorCode::BadParams, "Gilbert-Elliott probabilities must be in [0, 1]");
  if (model.plr == 0.0) return mask;
  const double denom = ge.p_good_to_bad + ge.p_bad_to_good;
  const double pi_bad = denom > 0.0 ? ge.p_good_to_bad / denom : 0.0;
  if (pi_bad <= 0.0) throw Error(ErrorCode::BadParams, "Gilbert-Elliott chain never enters the bad state");
  const double loss_in_bad = model.plr / pi_bad;
  if (loss_in_bad > 1.0 + 1e-12)
    throw Error(ErrorCode::BadParams, "stationary bad-state probability too small for the requested plr");

  // Start in the stationary distribution.
  bool bad = counter_uniform(model.seed ^ kStateStream, 0) < pi_bad;
  for (std::size_t i = 0; i < n_packets; ++i) {
    if (i > 0) {
      const double u = counter_uniform(model.seed ^ kStateStream, i);
      bad = bad ? !(u < ge.p_bad_to_good) : (u < ge.p_good_to_bad);
    }
    mask[i] = bad && counter_uniform(model.seed, i) < loss_in_bad;
  }
  return mask;
}

PacketStream apply_loss(PacketStream stream, const LossModel &model) {
  stream.loss_mask = draw_loss_mask(stream.packets.size(), model);
  return stream;
}

AudioBuffer conceal(const PacketStream &stream, Concealment strategy) {
  if (!stream.loss_mask) throw Error(ErrorCode::NoMask, "packet stream has no loss mask");
  const auto &mask = *stream.loss_mask;
  if (mask.size() != stream.packets.size()) throw Error(ErrorCode::NoMask, "loss mask length mismatch");
  const std::size_t ps = stream.packet_samples;
  const std::size_t np = stream.packets.size();

  std::vector<std::int16_t> flat;
  flat.reserve(np * ps);
  for (const auto &p : stream.packets) flat.insert(flat.end(), p.begin(), p.end());

  std::size_t p = 0;
  while (p < np) {
    if (!mask[p]) {
      ++p;
      continue;
    }
    std::size_t gap_end = p;
    while (gap_end < np && mask[gap_end]) ++gap_end;
    const std::size_t lo = p * ps, hi = gap_end * ps;
    switch (strategy) {
      case Concealment::ZeroFill:
        std::fill(flat.begin() + static_cast<long>(lo), flat.begin() + static_cast<long>(hi), 0);
        break;
      case Concealment::RepeatPrevious:
        for (std::size_t q = p; q < gap_end; ++q) {
          for (std::size_t k = 0; k < ps; ++k)
            flat[q * ps + k] = p == 0 ? std::int16_t{0} : flat[(p - 1) * ps + k];
        }
        break;
      case Concealment::LinearInterp: {
        if (p == 0 || gap_end == np) {
          std::fill(flat.begin() + static_cast<long>(lo), flat.begin() + static_cast<long>(hi), 0);
          break;
        }
        const double a = flat[lo - 1];
        const double b = flat[hi];
        const double span = static_cast<double>(hi - lo + 1);
        for (std::size_t i = lo; i < hi; ++i) {
          const double t = static_cast<double>(i - lo + 1) / span;
          flat[i] = clamp_to_i16(a + (b - a) * t);
        }
        break;
      }
    }
    p = gap_end;
  }

  AudioBuffer out;
  out.sample_rate = stream.sample_rate;
  flat.resize(stream.original_length());
  out.samples = std::move(flat);
  return out;
}

std::vector<bool> transmit_loss_mask(std::size_t n_samples, const ChannelCondition &cond) {
  const std::size_t ps = packet_size(kPipelineRate, cond.frame_ms);
  return draw_loss_mask((n_samples + ps - 1) / ps, cond.loss);
}

AudioBuffer transmit(const AudioBuffer &audio, const ChannelCondition &cond, const ExternalCodecTemplate *tmpl,
                     const std::string &scratch_key) {
  AudioBuffer coded = apply_codec(audio, cond.codec, tmpl, scratch_key);
  PacketStream stream = apply_loss(packetize(coded, cond.frame_ms), cond.loss);
  return conceal(stream, cond.concealment);
}

std::string mask_to_bits(const std::vector<bool> &mask) {
  std::string s(mask.size(), '0');
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s[i] = '1';
  return s;
}

}  // namespace addbench
