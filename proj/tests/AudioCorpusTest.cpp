// tests/AudioCorpusTest.cpp

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
#include <cstring>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "TestUtils.hpp"
#include "addbench/audio.hpp"
#include "addbench/corpus.hpp"
#include "addbench/error.hpp"
#include "addbench/log.hpp"

using namespace addbench;
using addbench::test::TempDir;

namespace {

// Hand-assembled PCM WAVE image, independent of encode_wave.
std::string wave_bytes(int channels, int rate, int bits, const std::string &payload, bool extensible = false) {
  auto u16 = [](std::uint16_t v) { return std::string{static_cast<char>(v & 0xff), static_cast<char>(v >> 8)}; };
  auto u32 = [&](std::uint32_t v) { return u16(v & 0xffff) + u16(v >> 16); };
  const int block = channels * bits / 8;
  std::string fmt = u16(extensible ? 0xFFFE : 1) + u16(channels) + u32(rate) + u32(rate * block) + u16(block) + u16(bits);
  if (extensible) fmt += u16(22) + u16(bits) + u32(0) + u16(1) + std::string(14, '\0');
  std::string body = "WAVE" + std::string("fmt ") + u32(fmt.size()) + fmt + "LIST" + u32(4) + "INFO" + "data" +
                     u32(payload.size()) + payload;
  return "RIFF" + u32(body.size()) + body;
}

void write_file(const std::filesystem::path &p, const std::string &bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

void write_manifest_text(const std::filesystem::path &p, const std::string &text) { write_file(p, text); }

RawAudio mono(const std::vector<double> &v, int rate) {
  RawAudio r;
  r.interleaved = v;
  r.channels = 1;
  r.sample_rate = rate;
  return r;
}

}  // namespace

TEST(AudioTest, ClampRoundsHalfAwayAndSaturates) {
  EXPECT_EQ(clamp_to_i16(0.5), 1);
  EXPECT_EQ(clamp_to_i16(-0.5), -1);
  EXPECT_EQ(clamp_to_i16(1.49), 1);
  EXPECT_EQ(clamp_to_i16(40000.0), 32767);
  EXPECT_EQ(clamp_to_i16(-40000.0), -32768);
  EXPECT_EQ(clamp_to_i16(std::nan("")), 0);
}

TEST(AudioTest, WaveRoundTrip) {
  TempDir dir("wave");
  AudioBuffer a = test::white_noise(3, 30000.0, 1000);
  write_wave(dir / "a.wav", a);
  RawAudio r = read_wave(dir / "a.wav");
  ASSERT_EQ(r.channels, 1);
  ASSERT_EQ(r.sample_rate, 16000);
  ASSERT_EQ(r.frames(), 1000u);
  for (std::size_t i = 0; i < 1000; ++i) EXPECT_EQ(r.interleaved[i], a.samples[i]);
  const auto img = encode_wave(a);
  EXPECT_EQ(test::read_bytes(dir / "a.wav"), std::string(img.begin(), img.end()));
  EXPECT_EQ(img.size(), 44u + 2000u);
}

TEST(AudioTest, ReadsEightAndTwentyFourBitAndExtensible) {
  TempDir dir("depth");
  // 8-bit unsigned: 0 -> -32768, 128 -> 0, 255 -> 127 * 256.
  write_file(dir / "u8.wav", wave_bytes(1, 8000, 8, std::string{'\x00', '\x80', '\xff'}));
  RawAudio r8 = read_wave(dir / "u8.wav");
  ASSERT_EQ(r8.frames(), 3u);
  EXPECT_DOUBLE_EQ(r8.interleaved[0], -32768.0);
  EXPECT_DOUBLE_EQ(r8.interleaved[1], 0.0);
  EXPECT_DOUBLE_EQ(r8.interleaved[2], 127.0 * 256.0);

  // 24-bit: 0x400000 (= 2^22) is half of full scale -> 16384.
  write_file(dir / "s24.wav", wave_bytes(2, 44100, 24, std::string{'\x00', '\x00', '\x40', '\x00', '\x00', '\xc0'}, true));
  RawAudio r24 = read_wave(dir / "s24.wav");
  ASSERT_EQ(r24.channels, 2);
  ASSERT_EQ(r24.sample_rate, 44100);
  EXPECT_DOUBLE_EQ(r24.interleaved[0], 16384.0);
  EXPECT_DOUBLE_EQ(r24.interleaved[1], -16384.0);
}

TEST(AudioTest, RejectsMalformedFiles) {
  TempDir dir("bad");
  write_file(dir / "junk.wav", "definitely not a wave file");
  try {
    read_wave(dir / "junk.wav");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::BadWave);
  }
  write_file(dir / "float.wav", wave_bytes(1, 16000, 32, std::string(8, '\0')));
  EXPECT_THROW(read_wave(dir / "float.wav"), Error);
  try {
    read_wave(dir / "absent.wav");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFile);
  }
}

TEST(ManifestTest, LoadsWellFormedFile) {
  TempDir dir("manifest");
  for (const char *n : {"a", "b", "c", "d"}) write_wave(dir / (std::string(n) + ".wav"), test::constant(0, 10));
  write_manifest_text(dir / "m.csv",
                      "id,label,source_dataset,algorithm,path\n"
                      "u1,bonafide,FoR,,a.wav\n"
                      "u2,fake,FoR,tts1,b.wav\n"
                      "\"u,3\",fake,ASV,\"vc, 2\",c.wav\n"
                      "u4,bonafide,ASV,,d.wav\n");
  Manifest m = load_manifest(dir / "m.csv");
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m.entries()[2].id, "u,3");
  EXPECT_EQ(m.entries()[2].algorithm, "vc, 2");
  EXPECT_EQ(m.entries()[0].path, dir / "a.wav");
  EXPECT_EQ(m.count(Label::Fake, "FoR"), 1u);
  EXPECT_EQ(m.count(Label::Bonafide, "ASV"), 1u);
  EXPECT_EQ(m.sources(), (std::vector<std::string>{"ASV", "FoR"}));
}

TEST(ManifestTest, DuplicateIdNamesTheId) {
  TempDir dir("dup");
  write_wave(dir / "a.wav", test::constant(0, 10));
  write_manifest_text(dir / "m.csv",
                      "id,label,source_dataset,algorithm,path\nu1,bonafide,FoR,,a.wav\nu1,fake,FoR,,a.wav\n");
  try {
    load_manifest(dir / "m.csv");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateId);
    EXPECT_NE(std::string(e.what()).find("u1"), std::string::npos);
  }
}

TEST(ManifestTest, BadLabelAndMissingFiles) {
  TempDir dir("label");
  write_wave(dir / "a.wav", test::constant(0, 10));
  write_manifest_text(dir / "m.csv", "id,label,source_dataset,algorithm,path\nu1,spoofed,FoR,,a.wav\n");
  try {
    load_manifest(dir / "m.csv");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::BadLabel);
  }
  write_manifest_text(dir / "n.csv", "id,label,source_dataset,algorithm,path\nu1,fake,FoR,,gone.wav\n");
  try {
    load_manifest(dir / "n.csv");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFile);
  }
  try {
    load_manifest(dir / "none.csv");
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingFile);
  }
}

TEST(ManifestTest, WriteThenLoadRoundTrip) {
  TempDir dir("rt");
  std::filesystem::create_directories(dir / "wav");
  std::vector<Utterance> rows;
  for (int i = 0; i < 6; ++i) {
    auto p = dir / "wav" / ("x" + std::to_string(i) + ".wav");
    write_wave(p, test::constant(0, 5));
    rows.push_back({"x" + std::to_string(i), i % 2 ? Label::Fake : Label::Bonafide, i < 3 ? "A" : "B",
                    i % 2 ? "alg,1" : "", p});
  }
  Manifest m(rows);
  write_manifest(dir / "m.csv", m);
  EXPECT_NE(test::read_bytes(dir / "m.csv").find("wav/x0.wav"), std::string::npos);
  EXPECT_EQ(load_manifest(dir / "m.csv").entries(), m.entries());
}

TEST(ManifestTest, CountsStableUnderReordering) {
  std::vector<Utterance> rows;
  Rng rng(5);
  for (int i = 0; i < 200; ++i)
    rows.push_back({"id" + std::to_string(i), rng.below(2) ? Label::Fake : Label::Bonafide,
                    "S" + std::to_string(rng.below(4)), "", "x.wav"});
  const Manifest base(rows);
  for (int trial = 0; trial < 20; ++trial) {
    rng.shuffle(rows);
    const Manifest shuffled(rows);
    EXPECT_EQ(shuffled.counts(), base.counts());
    // Counts agree with a direct recount.
    std::map<Manifest::CountKey, std::size_t> recount;
    for (const auto &u : rows) ++recount[{u.label, u.source_dataset}];
    EXPECT_EQ(shuffled.counts(), recount);
  }
}

TEST(NormalizeTest, MonoSixteenKhzIsIdentity) {
  AudioBuffer a = test::white_noise(11, 32767.0);
  AudioBuffer n = normalize_audio(to_raw(a));
  EXPECT_EQ(n.samples, a.samples);
  EXPECT_EQ(n.size(), 64000u);
  EXPECT_EQ(n.sample_rate, 16000);
}

TEST(NormalizeTest, OppositeStereoChannelsCancel) {
  AudioBuffer a = test::white_noise(12, 20000.0, 16000);
  RawAudio r;
  r.channels = 2;
  for (auto s : a.samples) {
    r.interleaved.push_back(s);
    r.interleaved.push_back(-static_cast<double>(s));
  }
  AudioBuffer n = normalize_audio(r);
  ASSERT_EQ(n.size(), 16000u);
  EXPECT_TRUE(std::all_of(n.samples.begin(), n.samples.end(), [](auto v) { return v == 0; }));
}

TEST(NormalizeTest, FortyEightKhzDownsamplesToExpectedLengthAndContent) {
  std::vector<double> x(48000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 10000.0 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 48000.0);
  AudioBuffer n = normalize_audio(mono(x, 48000));
  EXPECT_NEAR(static_cast<double>(n.size()), 16000.0, 1.0);
  // Oracle: the same tone sampled directly at 16 kHz, compared away from the edges.
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 200; i + 200 < n.size(); ++i) {
    const double want = 10000.0 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 16000.0);
    err += (n.samples[i] - want) * (n.samples[i] - want);
    ref += want * want;
  }
  EXPECT_LT(std::sqrt(err / ref), 0.01);
}

TEST(NormalizeTest, OutputLengthFollowsRateRatio) {
  for (int rate : {8000, 11025, 22050, 32000, 44100, 48000}) {
    for (std::size_t n : {1u, 7u, 1000u, 12345u}) {
      AudioBuffer out = normalize_audio(mono(std::vector<double>(n, 100.0), rate));
      const double want = std::round(static_cast<double>(n) * 16000.0 / rate);
      EXPECT_NEAR(static_cast<double>(out.size()), std::max(want, 0.0), 1.0) << rate << " " << n;
    }
  }
}

TEST(NormalizeTest, IsIdempotent) {
  Rng rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const int rates[] = {8000, 16000, 22050, 44100, 48000};
    RawAudio r;
    r.sample_rate = rates[trial % 5];
    r.channels = 1 + trial % 2;
    const std::size_t frames = 500 + rng.below(3000);
    for (std::size_t i = 0; i < frames * r.channels; ++i) r.interleaved.push_back(rng.uniform(-40000.0, 40000.0));
    const AudioBuffer once = normalize_audio(r);
    const AudioBuffer twice = normalize_audio(to_raw(once));
    EXPECT_EQ(once, twice);
  }
}

TEST(NormalizeTest, RejectsEmptyAndBadRate) {
  try {
    normalize_audio(mono({}, 16000));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyAudio);
  }
  try {
    normalize_audio(mono({1.0}, 0));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedRate);
  }
}

TEST(NormalizeTest, EmptyFileLoadsAsSilenceWithWarning) {
  TempDir dir("empty");
  write_wave(dir / "e.wav", std::vector<std::int16_t>{}, 1, 16000);
  std::vector<std::string> warnings;
  set_log_sink([&](LogLevel level, const std::string &m) {
    if (level == LogLevel::Warning) warnings.push_back(m);
  });
  AudioBuffer a = load_utterance_audio(dir / "e.wav");
  set_log_sink(nullptr);
  EXPECT_EQ(a.size(), 64000u);
  EXPECT_TRUE(std::all_of(a.samples.begin(), a.samples.end(), [](auto v) { return v == 0; }));
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(FixLengthTest, Examples) {
  AudioBuffer exact = test::white_noise(1, 1000.0, 64000);
  EXPECT_EQ(fix_length(exact), exact);

  AudioBuffer shorter = test::white_noise(2, 1000.0, 48000);
  AudioBuffer padded = fix_length(shorter);
  ASSERT_EQ(padded.size(), 64000u);
  EXPECT_TRUE(std::equal(shorter.samples.begin(), shorter.samples.end(), padded.samples.begin()));
  EXPECT_TRUE(std::all_of(padded.samples.begin() + 48000, padded.samples.end(), [](auto v) { return v == 0; }));

  AudioBuffer longer = test::white_noise(3, 1000.0, 80000);
  AudioBuffer cut = fix_length(longer);
  ASSERT_EQ(cut.size(), 64000u);
  EXPECT_TRUE(std::equal(cut.samples.begin(), cut.samples.end(), longer.samples.begin()));

  EXPECT_EQ(fix_length(AudioBuffer{}).size(), 64000u);
}

TEST(FixLengthTest, LengthAndPrefixProperties) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = rng.below(130000);
    AudioBuffer a = test::white_noise(trial, 30000.0, n);
    AudioBuffer f = fix_length(a);
    ASSERT_EQ(f.size(), 64000u);
    const std::size_t k = std::min<std::size_t>(n, 64000);
    EXPECT_TRUE(std::equal(a.samples.begin(), a.samples.begin() + k, f.samples.begin()));
  }
}

TEST(ResampleTest, EqualRatesAreIdentity) {
  std::vector<double> x = {1.0, -2.5, 3.25, 7.0};
  EXPECT_EQ(resample(x, 22050, 22050), x);
}
