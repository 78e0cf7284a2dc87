// tests/ChannelTest.cpp

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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "TestUtils.hpp"
#include "addbench/channel.hpp"
#include "addbench/error.hpp"
#include "addbench/synth.hpp"

using namespace addbench;

namespace {

LossModel bernoulli(double plr, std::uint64_t seed) {
  LossModel m;
  m.plr = plr;
  m.seed = seed;
  return m;
}

ChannelCondition condition(const CodecSpec &codec, double plr, std::uint64_t seed,
                           Concealment c = Concealment::ZeroFill) {
  ChannelCondition cond;
  cond.codec = codec;
  cond.loss = bernoulli(plr, seed);
  cond.concealment = c;
  return cond;
}

std::size_t lost(const std::vector<bool> &mask) { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }

}  // namespace

TEST(PacketizeTest, Examples) {
  PacketStream a = packetize(test::constant(1, 64000));
  EXPECT_EQ(a.packets.size(), 200u);
  EXPECT_EQ(a.packet_samples, 320u);
  EXPECT_EQ(a.tail_pad, 0u);

  PacketStream b = packetize(test::constant(1, 63900));
  EXPECT_EQ(b.packets.size(), 200u);
  EXPECT_EQ(b.tail_pad, 100u);

  PacketStream c = packetize(test::constant(1, 320));
  EXPECT_EQ(c.packets.size(), 1u);
  EXPECT_EQ(c.tail_pad, 0u);
}

TEST(PacketizeTest, InvariantsAndInverse) {
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.below(70000);
    const double frame_ms = trial % 3 == 0 ? 10.0 : 20.0;
    const AudioBuffer a = test::white_noise(trial, 20000.0, n);
    const PacketStream s = packetize(a, frame_ms);
    EXPECT_LT(s.tail_pad, s.packet_samples);
    for (const auto &p : s.packets) ASSERT_EQ(p.size(), s.packet_samples);
    EXPECT_EQ(s.original_length(), n);
    EXPECT_EQ(depacketize(s), a);
  }
  EXPECT_THROW(packetize(test::constant(1, 10), 0.0), Error);
}

TEST(LossMaskTest, EdgeRates) {
  for (std::size_t n : {0u, 1u, 17u, 1000u}) {
    const auto none = draw_loss_mask(n, bernoulli(0.0, 3));
    EXPECT_EQ(none.size(), n);
    EXPECT_EQ(lost(none), 0u);
  }
  const auto all = draw_loss_mask(50, bernoulli(1.0, 3));
  EXPECT_EQ(lost(all), 50u);
  EXPECT_THROW(draw_loss_mask(10, bernoulli(1.5, 3)), Error);
  EXPECT_THROW(draw_loss_mask(10, bernoulli(-0.1, 3)), Error);
}

TEST(LossMaskTest, TenPercentWithinThreeSigma) {
  const auto mask = draw_loss_mask(10000, bernoulli(0.1, 7));
  EXPECT_NEAR(static_cast<double>(lost(mask)), 1000.0, 90.0);
}

TEST(LossMaskTest, BinomialBoundsAcrossSeeds) {
  for (double plr : {0.01, 0.05, 0.10, 0.20}) {
    const double sigma = std::sqrt(10000.0 * plr * (1.0 - plr));
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const double k = static_cast<double>(lost(draw_loss_mask(10000, bernoulli(plr, seed))));
      inside += std::abs(k - 10000.0 * plr) <= 3.0 * sigma;
    }
    EXPECT_GE(inside, 99) << plr;
  }
}

TEST(LossMaskTest, ConvergesWithLength) {
  for (double plr : {0.05, 0.2}) {
    double previous_err = 1.0;
    for (std::size_t n : {1000u, 100000u, 1000000u}) {
      const double frac = static_cast<double>(lost(draw_loss_mask(n, bernoulli(plr, 42)))) / static_cast<double>(n);
      EXPECT_LE(std::abs(frac - plr), 3.0 * std::sqrt(plr * (1.0 - plr) / static_cast<double>(n)) + 1e-12);
      previous_err = std::abs(frac - plr);
    }
    EXPECT_LT(previous_err, 0.002);
  }
}

TEST(LossMaskTest, PrefixStableAndOrderFree) {
  // Packet i depends only on (seed, i): a longer mask extends a shorter one.
  const auto short_mask = draw_loss_mask(100, bernoulli(0.3, 9));
  const auto long_mask = draw_loss_mask(1000, bernoulli(0.3, 9));
  EXPECT_TRUE(std::equal(short_mask.begin(), short_mask.end(), long_mask.begin()));
  for (std::size_t i = 0; i < 1000; ++i) EXPECT_EQ(long_mask[i], counter_uniform(9, i) < 0.3);
}

TEST(LossMaskTest, GilbertElliottMatchesTargetRateAndIsBursty) {
  LossModel ge = bernoulli(0.1, 11);
  ge.kind = LossKind::GilbertElliott;
  const std::size_t n = 400000;
  const auto mask = draw_loss_mask(n, ge);
  EXPECT_NEAR(static_cast<double>(lost(mask)) / n, 0.1, 0.01);
  // Burstiness: P(loss | previous loss) exceeds the marginal rate.
  std::size_t pairs = 0, both = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (mask[i - 1]) {
      ++pairs;
      both += mask[i];
    }
  EXPECT_GT(static_cast<double>(both) / pairs, 0.2);

  LossModel explicit_ge = ge;
  explicit_ge.ge = GilbertElliottParams{0.05, 0.25};
  EXPECT_NEAR(static_cast<double>(lost(draw_loss_mask(n, explicit_ge))) / n, 0.1, 0.01);

  LossModel impossible = ge;
  impossible.ge = GilbertElliottParams{0.01, 0.9};  // stationary bad share ~1.1% < 10%
  try {
    draw_loss_mask(100, impossible);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::BadParams);
  }
}

TEST(ConcealTest, NoLossIsBitExact) {
  const AudioBuffer a = test::white_noise(4, 25000.0, 63900);
  for (auto c : {Concealment::ZeroFill, Concealment::RepeatPrevious, Concealment::LinearInterp}) {
    PacketStream s = apply_loss(packetize(a), bernoulli(0.0, 1));
    EXPECT_EQ(conceal(s, c), a);
  }
}

TEST(ConcealTest, AllLostZeroFillIsSilent) {
  PacketStream s = apply_loss(packetize(test::white_noise(5, 25000.0)), bernoulli(1.0, 1));
  const AudioBuffer out = conceal(s, Concealment::ZeroFill);
  EXPECT_EQ(out.size(), 64000u);
  EXPECT_EQ(out, test::constant(0));
}

TEST(ConcealTest, LinearInterpOfConstantIsConstant) {
  for (std::int16_t c : {std::int16_t{1234}, std::int16_t{-32768}, std::int16_t{32767}}) {
    PacketStream s = packetize(test::constant(c));
    std::vector<bool> mask(s.packets.size(), false);
    mask[100] = true;
    mask[150] = mask[151] = mask[152] = true;
    s.loss_mask = mask;
    for (std::size_t p = 0; p < mask.size(); ++p)
      if (mask[p]) std::fill(s.packets[p].begin(), s.packets[p].end(), 0);
    EXPECT_EQ(conceal(s, Concealment::LinearInterp), test::constant(c));
  }
}

TEST(ConcealTest, RepeatPreviousCopiesLastGoodPacket) {
  const AudioBuffer a = test::white_noise(6, 25000.0);
  PacketStream s = packetize(a);
  std::vector<bool> mask(s.packets.size(), false);
  mask[0] = mask[10] = mask[11] = true;
  s.loss_mask = mask;
  const AudioBuffer out = conceal(s, Concealment::RepeatPrevious);
  for (std::size_t k = 0; k < 320; ++k) {
    EXPECT_EQ(out.samples[k], 0);
    EXPECT_EQ(out.samples[10 * 320 + k], a.samples[9 * 320 + k]);
    EXPECT_EQ(out.samples[11 * 320 + k], a.samples[9 * 320 + k]);
    EXPECT_EQ(out.samples[12 * 320 + k], a.samples[12 * 320 + k]);
  }
}

TEST(ConcealTest, MissingMaskIsAnError) {
  try {
    conceal(packetize(test::constant(1, 640)), Concealment::ZeroFill);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::NoMask);
  }
}

TEST(TransmitTest, IdentityWithoutLossIsBitExact) {
  const AudioBuffer a = synth_utterance(Label::Bonafide, 2);
  EXPECT_EQ(transmit(a, condition(identity_codec(), 0.0, 1)), a);
  const AudioBuffer odd = test::white_noise(3, 32767.0, 12345);
  EXPECT_EQ(transmit(odd, condition(identity_codec(), 0.0, 1)), odd);
}

TEST(TransmitTest, IdentityWithTotalLossIsSilent) {
  const AudioBuffer a = synth_utterance(Label::Fake, 2);
  EXPECT_EQ(transmit(a, condition(identity_codec(), 1.0, 1)), test::constant(0, a.size()));
}

TEST(TransmitTest, OnlyMaskedPacketsDifferFromCodecOutput) {
  const AudioBuffer a = test::white_noise(10, 16000.0);
  const CodecSpec amr = *find_codec("AMR-WB");
  const AudioBuffer coded = apply_codec(a, amr);
  const AudioBuffer sent = transmit(a, condition(amr, 0.05, 7));
  // Independent recomputation of the Bernoulli mask.
  std::set<std::size_t> expected;
  for (std::size_t i = 0; i < 200; ++i)
    if (counter_uniform(7, i) < 0.05) expected.insert(i);
  ASSERT_FALSE(expected.empty());
  std::set<std::size_t> differing;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (coded.samples[i] != sent.samples[i]) differing.insert(i / 320);
  EXPECT_EQ(differing, expected);
  const auto mask = draw_loss_mask(200, bernoulli(0.05, 7));
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(mask[i], expected.contains(i));
  EXPECT_EQ(transmit_loss_mask(a.size(), condition(amr, 0.05, 7)), mask);
}

TEST(TransmitTest, DeterministicAndLengthPreserving) {
  Rng rng(12);
  for (const auto &codec : default_registry()) {
    const std::size_t n = 1000 + rng.below(70000);
    const AudioBuffer a = test::white_noise(n, 10000.0, n);
    for (auto c : {Concealment::ZeroFill, Concealment::RepeatPrevious, Concealment::LinearInterp}) {
      const auto cond = condition(codec, 0.2, n, c);
      const AudioBuffer x = transmit(a, cond), y = transmit(a, cond);
      EXPECT_EQ(x, y);
      EXPECT_EQ(x.size(), n);
    }
  }
}

TEST(SubseedTest, IndependentAcrossUtterancesAndConditions) {
  std::set<std::uint64_t> seeds;
  for (int u = 0; u < 50; ++u)
    for (int c = 1; c <= 6; ++c)
      for (double plr : kConditionPlr) seeds.insert(derive_subseed(1, "utt" + std::to_string(u), c, plr));
  EXPECT_EQ(seeds.size(), 50u * 6u * 5u);
  EXPECT_EQ(derive_subseed(3, "a", 1, 0.05), derive_subseed(3, "a", 1, 0.0500000001));
  EXPECT_NE(derive_subseed(3, "a", 1, 0.05), derive_subseed(4, "a", 1, 0.05));
  // Masks of different utterances are not copies of each other.
  const auto m1 = draw_loss_mask(2000, bernoulli(0.2, derive_subseed(1, "x", 1, 0.2)));
  const auto m2 = draw_loss_mask(2000, bernoulli(0.2, derive_subseed(1, "y", 1, 0.2)));
  EXPECT_NE(m1, m2);
}

TEST(ConditionPlrTest, Table) {
  EXPECT_DOUBLE_EQ(plr_for_condition(1), 0.0);
  EXPECT_DOUBLE_EQ(plr_for_condition(2), 0.01);
  EXPECT_DOUBLE_EQ(plr_for_condition(3), 0.05);
  EXPECT_DOUBLE_EQ(plr_for_condition(4), 0.10);
  EXPECT_DOUBLE_EQ(plr_for_condition(5), 0.20);
  EXPECT_THROW(plr_for_condition(0), Error);
  EXPECT_THROW(plr_for_condition(6), Error);
}
