// src/audio.cpp

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

#include "addbench/audio.hpp"

#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "addbench/error.hpp"

namespace addbench {

namespace {

std::uint32_t le32(const std::uint8_t *p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

std::uint16_t le16(const std::uint8_t *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

std::vector<std::uint8_t> encode(std::span<const std::int16_t> interleaved, int channels,
                                 int sample_rate) {
  std::vector<std::uint8_t> out;
  std::uint32_t data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, 1);  // PCM
  put16(out, static_cast<std::uint16_t>(channels));
  put32(out, static_cast<std::uint32_t>(sample_rate));
  put32(out, static_cast<std::uint32_t>(sample_rate * channels * 2));
  put16(out, static_cast<std::uint16_t>(channels * 2));
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, data_bytes);
  for (std::int16_t s : interleaved) put16(out, static_cast<std::uint16_t>(s));
  return out;
}

}  // namespace

RawAudio read_wave(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  auto bad = [&](const std::string &why) {
    return Error(ErrorCode::BadWave, path.string() + ": " + why);
  };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw bad("not a RIFF/WAVE file");

  int channels = 0, rate = 0, bits = 0;
  bool have_fmt = false;
  const std::uint8_t *data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t *chunk = bytes.data() + pos;
    std::uint32_t len = le32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t avail = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16 || avail < 16) throw bad("short fmt chunk");
      std::uint16_t format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = static_cast<int>(le32(chunk + 12));
      bits = le16(chunk + 22);
      if (format == 0xFFFE && len >= 40 && avail >= 40) format = le16(chunk + 32);
      if (format != 1) throw bad("only integer PCM is supported");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      // Streaming writers leave the size field at 0 or 0xFFFFFFFF.
      data_len = (len == 0 || len > avail) ? avail : len;
      break;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) throw bad("missing fmt chunk");
  if (data == nullptr) throw bad("missing data chunk");
  if (channels < 1 || channels > 2) throw bad("unsupported channel count " + std::to_string(channels));
  if (bits != 8 && bits != 16 && bits != 24) throw bad("unsupported bit depth " + std::to_string(bits));

  RawAudio raw;
  raw.channels = channels;
  raw.sample_rate = rate;
  std::size_t width = static_cast<std::size_t>(bits / 8);
  std::size_t n = data_len / (width * static_cast<std::size_t>(channels)) * static_cast<std::size_t>(channels);
  raw.interleaved.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t *p = data + i * width;
    double v;
    switch (bits) {
      case 8:
        v = (static_cast<int>(p[0]) - 128) * 256.0;
        break;
      case 16:
        v = static_cast<std::int16_t>(le16(p));
        break;
      default: {
        std::int32_t s = std::int32_t(p[0]) | (std::int32_t(p[1]) << 8) | (std::int32_t(p[2]) << 16);
        if (s & 0x800000) s -= 0x1000000;
        v = s / 256.0;
      }
    }
    raw.interleaved[i] = v;
  }
  return raw;
}

std::vector<std::uint8_t> encode_wave(const AudioBuffer &audio) {
  return encode(audio.samples, 1, audio.sample_rate);
}

void write_wave(const std::filesystem::path &path, std::span<const std::int16_t> interleaved,
                int channels, int sample_rate) {
  auto bytes = encode(interleaved, channels, sample_rate);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_wave(const std::filesystem::path &path, const AudioBuffer &audio) {
  write_wave(path, audio.samples, 1, audio.sample_rate);
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::BadManifest: return "BadManifest";
    case ErrorCode::EmptyAudio: return "EmptyAudio";
    case ErrorCode::UnsupportedRate: return "UnsupportedRate";
    case ErrorCode::BadWave: return "BadWave";
    case ErrorCode::BadLength: return "BadLength";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::ToolNotFound: return "ToolNotFound";
    case ErrorCode::ToolFailed: return "ToolFailed";
    case ErrorCode::OutputUnreadable: return "OutputUnreadable";
    case ErrorCode::BadFrame: return "BadFrame";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::NoMask: return "NoMask";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::BadCache: return "BadCache";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ClassMissing: return "ClassMissing";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::BadModel: return "BadModel";
    case ErrorCode::OneClassOnly: return "OneClassOnly";
    case ErrorCode::MissingScores: return "MissingScores";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::StageInputMissing: return "StageInputMissing";
    case ErrorCode::StaleCache: return "StaleCache";
  }
  return "Unknown";
}

}  // namespace addbench
