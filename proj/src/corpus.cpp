// src/corpus.cpp

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

#include "addbench/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

#include "addbench/error.hpp"
#include "addbench/log.hpp"

namespace addbench {

namespace {

std::mutex g_log_mutex;
LogSink g_sink;

// RFC 4180-ish: quoted fields, doubled quotes inside quotes. No embedded newlines.
std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_sink = std::move(sink);
}

void log_message(LogLevel level, const std::string &message) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (g_sink) {
    g_sink(level, message);
    return;
  }
  std::cerr << (level == LogLevel::Warning ? "WARNING: " : "") << message << '\n';
}

std::string_view to_string(Label label) {
  return label == Label::Bonafide ? "bonafide" : "fake";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "bonafide") return Label::Bonafide;
  if (text == "fake") return Label::Fake;
  return std::nullopt;
}

Manifest::Manifest(std::vector<Utterance> entries) : entries_(std::move(entries)) {
  std::set<std::string> seen;
  for (const auto &u : entries_) {
    if (!seen.insert(u.id).second) throw Error(ErrorCode::DuplicateId, u.id);
    ++counts_[{u.label, u.source_dataset}];
  }
}

std::size_t Manifest::count(Label label, const std::string &source) const {
  auto it = counts_.find({label, source});
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::string> Manifest::sources() const {
  std::set<std::string> s;
  for (const auto &u : entries_) s.insert(u.source_dataset);
  return {s.begin(), s.end()};
}

Manifest load_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::BadManifest, path.string() + ": empty file");
  auto header = split_csv_line(trim(line));
  for (auto &h : header) h = trim(h);
  auto col = [&](const std::string &name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  int c_id = col("id"), c_label = col("label"), c_src = col("source_dataset"),
      c_alg = col("algorithm"), c_path = col("path");
  if (c_id < 0 || c_label < 0 || c_src < 0 || c_path < 0)
    throw Error(ErrorCode::BadManifest,
                path.string() + ": header must contain id,label,source_dataset,path");

  std::filesystem::path base = path.parent_path();
  std::vector<Utterance> entries;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    int need = std::max({c_id, c_label, c_src, c_alg, c_path});
    if (static_cast<int>(f.size()) <= need)
      throw Error(ErrorCode::BadManifest, path.string() + ": row " + std::to_string(row) + " has too few columns");
    auto label = parse_label(trim(f[c_label]));
    if (!label)
      throw Error(ErrorCode::BadLabel, "row " + std::to_string(row) + " label '" + f[c_label] + "'");
    Utterance u;
    u.id = trim(f[c_id]);
    u.label = *label;
    u.source_dataset = trim(f[c_src]);
    if (c_alg >= 0) u.algorithm = trim(f[c_alg]);
    std::filesystem::path p = trim(f[c_path]);
    u.path = p.is_absolute() ? p : (base / p).lexically_normal();
    if (!std::filesystem::exists(u.path))
      throw Error(ErrorCode::MissingFile, "row " + std::to_string(row) + " audio " + u.path.string());
    entries.push_back(std::move(u));
  }
  return Manifest(std::move(entries));
}

void write_manifest(const std::filesystem::path &path, const Manifest &manifest) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  auto base = std::filesystem::absolute(path.parent_path().empty() ? "." : path.parent_path())
                  .lexically_normal();
  out << "id,label,source_dataset,algorithm,path\n";
  for (const auto &u : manifest.entries()) {
    auto abs = std::filesystem::absolute(u.path).lexically_normal();
    auto rel = abs.lexically_relative(base);
    std::string p = rel.empty() ? abs.generic_string() : rel.generic_string();
    out << csv_escape(u.id) << ',' << to_string(u.label) << ',' << csv_escape(u.source_dataset) << ','
        << csv_escape(u.algorithm) << ',' << csv_escape(p) << '\n';
  }
}

std::vector<double> resample(const std::vector<double> &in, int in_rate, int out_rate) {
  if (in_rate <= 0 || out_rate <= 0)
    throw Error(ErrorCode::UnsupportedRate, std::to_string(in_rate) + " -> " + std::to_string(out_rate));
  if (in_rate == out_rate) return in;
  const std::size_t n_in = in.size();
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(n_in) * out_rate / static_cast<double>(in_rate)));
  constexpr int kHalfTaps = 32;
  // Filter cutoff at the lower Nyquist; time measured in input samples.
  const double ratio = static_cast<double>(std::min(in_rate, out_rate)) / in_rate;
  const double half_width = kHalfTaps / ratio;
  const double step = static_cast<double>(in_rate) / out_rate;
  std::vector<double> out(n_out, 0.0);
  for (std::size_t j = 0; j < n_out; ++j) {
    const double t = static_cast<double>(j) * step;
    auto lo = static_cast<long long>(std::ceil(t - half_width));
    auto hi = static_cast<long long>(std::floor(t + half_width));
    lo = std::max<long long>(lo, 0);
    hi = std::min<long long>(hi, static_cast<long long>(n_in) - 1);
    double acc = 0.0;
    for (long long i = lo; i <= hi; ++i) {
      const double x = t - static_cast<double>(i);
      const double arg = ratio * x;
      const double sinc = arg == 0.0 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
      const double w = 0.5 + 0.5 * std::cos(std::numbers::pi * x / half_width);  // Hann
      acc += in[static_cast<std::size_t>(i)] * ratio * sinc * w;
    }
    out[j] = acc;
  }
  return out;
}

AudioBuffer normalize_audio(const RawAudio &raw) {
  if (raw.sample_rate <= 0) throw Error(ErrorCode::UnsupportedRate, std::to_string(raw.sample_rate));
  if (raw.channels < 1) throw Error(ErrorCode::BadWave, "channel count < 1");
  const std::size_t frames = raw.frames();
  if (frames == 0) throw Error(ErrorCode::EmptyAudio, "no samples");
  std::vector<double> mono(frames);
  const auto ch = static_cast<std::size_t>(raw.channels);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < ch; ++c) acc += raw.interleaved[i * ch + c];
    mono[i] = acc / static_cast<double>(ch);
  }
  auto resampled = resample(mono, raw.sample_rate, kPipelineRate);
  AudioBuffer out;
  out.sample_rate = kPipelineRate;
  out.samples.resize(resampled.size());
  std::transform(resampled.begin(), resampled.end(), out.samples.begin(), clamp_to_i16);
  return out;
}

RawAudio to_raw(const AudioBuffer &audio) {
  RawAudio raw;
  raw.channels = 1;
  raw.sample_rate = audio.sample_rate;
  raw.interleaved.assign(audio.samples.begin(), audio.samples.end());
  return raw;
}

AudioBuffer fix_length(const AudioBuffer &audio, std::size_t length) {
  AudioBuffer out;
  out.sample_rate = audio.sample_rate;
  out.samples.assign(length, 0);
  std::copy_n(audio.samples.begin(), std::min(length, audio.samples.size()), out.samples.begin());
  return out;
}

AudioBuffer load_utterance_audio(const std::filesystem::path &path, std::size_t length) {
  RawAudio raw = read_wave(path);
  AudioBuffer normalized;
  try {
    normalized = normalize_audio(raw);
  } catch (const Error &e) {
    if (e.code() != ErrorCode::EmptyAudio) throw;
    log_warning("empty audio, substituting silence: " + path.string());
  }
  return fix_length(normalized, length);
}

}  // namespace addbench
