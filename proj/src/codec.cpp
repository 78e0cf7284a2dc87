// src/codec.cpp

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

#include "addbench/codec.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <unistd.h>

#include "addbench/corpus.hpp"
#include "addbench/dsp.hpp"
#include "addbench/error.hpp"
#include "addbench/rng.hpp"

namespace addbench {

namespace {

constexpr double kMu = 255.0;
constexpr std::size_t kLowpassTaps = 129;

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t samples_per_frame(const CodecSpec &spec, int rate) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rate * spec.frame_ms / 1000.0)));
}

std::size_t count_of(const std::string &s, std::string_view token) {
  std::size_t n = 0;
  for (auto pos = s.find(token); pos != std::string::npos; pos = s.find(token, pos + token.size())) ++n;
  return n;
}

// Single-quote for /bin/sh.
std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string substitute(std::string cmd, std::string_view key, const std::string &value) {
  for (auto pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + value.size()))
    cmd.replace(pos, key.size(), value);
  return cmd;
}

std::string search_path() {
  std::string path;
  if (const char *extra = std::getenv("ADDBENCH_CODEC_PATH"); extra && *extra) path = extra;
  if (const char *sys = std::getenv("PATH"); sys && *sys) {
    if (!path.empty()) path += ':';
    path += sys;
  }
  return path;
}

bool resolvable(const std::string &exe, const std::string &path) {
  if (exe.find('/') != std::string::npos) return ::access(exe.c_str(), X_OK) == 0;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    auto candidate = std::filesystem::path(dir) / exe;
    if (::access(candidate.c_str(), X_OK) == 0 && !std::filesystem::is_directory(candidate)) return true;
  }
  return false;
}

std::string first_token(const std::string &cmd) {
  std::size_t b = cmd.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  std::size_t e = cmd.find_first_of(" \t", b);
  return cmd.substr(b, e == std::string::npos ? std::string::npos : e - b);
}

class SubprocessLimiter {
 public:
  void set_cap(unsigned cap) {
    std::lock_guard<std::mutex> lock(m_);
    cap_ = std::max(1u, cap);
    cv_.notify_all();
  }
  void acquire() {
    std::unique_lock<std::mutex> lock(m_);
    cv_.wait(lock, [&] { return running_ < cap_; });
    ++running_;
  }
  void release() {
    std::lock_guard<std::mutex> lock(m_);
    --running_;
    cv_.notify_one();
  }

 private:
  std::mutex m_;
  std::condition_variable cv_;
  unsigned cap_ = 4;
  unsigned running_ = 0;
};

SubprocessLimiter &limiter() {
  static SubprocessLimiter instance;
  return instance;
}

void run_tool(const std::string &cmd) {
  const std::string path = search_path();
  const std::string exe = first_token(cmd);
  if (exe.empty() || !resolvable(exe, path)) throw Error(ErrorCode::ToolNotFound, exe.empty() ? cmd : exe);

  std::string full = "PATH=" + shell_quote(path) + "; export PATH; " + cmd + " 2>&1";
  limiter().acquire();
  std::string captured;
  int status = -1;
  if (FILE *pipe = ::popen(full.c_str(), "r")) {
    std::array<char, 512> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) captured.append(buf.data(), got);
    status = ::pclose(pipe);
  }
  limiter().release();
  if (status == -1) throw Error(ErrorCode::ToolFailed, "could not spawn: " + cmd);
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
  if (code == 127) throw Error(ErrorCode::ToolNotFound, exe);
  if (code != 0)
    throw Error(ErrorCode::ToolFailed, "exit status " + std::to_string(code) + " from '" + cmd + "': " + captured);
}

std::string sanitize(const std::string &key) {
  std::string out;
  for (char c : key) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  return out;
}

}  // namespace

void validate(const CodecSpec &spec) {
  if (!(spec.bandwidth_hz > 0.0) || spec.bandwidth_hz > 8000.0)
    throw Error(ErrorCode::BadSpec, spec.name + ": bandwidth_hz must be in (0, 8000]");
  if (!(spec.frame_ms > 0.0)) throw Error(ErrorCode::BadSpec, spec.name + ": frame_ms must be > 0");
  if (!(spec.bitrate_kbps > 0.0)) throw Error(ErrorCode::BadSpec, spec.name + ": bitrate_kbps must be > 0");
  if (spec.max_kbps > 0.0 && (spec.bitrate_kbps < spec.min_kbps || spec.bitrate_kbps > spec.max_kbps)) {
    std::ostringstream os;
    os << spec.name << ": bitrate " << spec.bitrate_kbps << " kbps outside [" << spec.min_kbps << ", "
       << spec.max_kbps << "]";
    throw Error(ErrorCode::BadSpec, os.str());
  }
}

std::vector<CodecSpec> default_registry() {
  auto make = [](std::string name, int index, double bw, double kbps, double lo, double hi) {
    CodecSpec s;
    s.name = std::move(name);
    s.index = index;
    s.bandwidth_hz = bw;
    s.bitrate_kbps = kbps;
    s.frame_ms = 20.0;
    s.min_kbps = lo;
    s.max_kbps = hi;
    return s;
  };
  return {
      make("AMR-WB", 1, 7000.0, 12.65, 6.60, 23.85),
      make("EVS", 2, 8000.0, 13.2, 5.90, 128.0),
      make("IVAS", 3, 8000.0, 13.2, 13.20, 512.0),
      make("OPUS", 4, 8000.0, 16.0, 6.0, 510.0),
      make("SpeexWB", 5, 7000.0, 11.0, 2.0, 44.0),
      make("SILK", 6, 8000.0, 12.0, 6.0, 40.0),
  };
}

CodecSpec identity_codec() {
  CodecSpec s;
  s.name = "identity";
  s.index = 0;
  s.bandwidth_hz = 8000.0;
  s.bitrate_kbps = 256.0;  // saturates the quantizer at 15 bits
  s.frame_ms = 20.0;
  return s;
}

std::optional<CodecSpec> find_codec(std::string_view name) {
  std::string key = lower(name);
  key.erase(std::remove_if(key.begin(), key.end(), [](char c) { return c == '-' || c == '_' || c == ' '; }),
            key.end());
  if (key == "identity" || key == "none") return identity_codec();
  if (key == "speex") key = "speexwb";
  for (const auto &spec : default_registry()) {
    std::string n = lower(spec.name);
    n.erase(std::remove(n.begin(), n.end(), '-'), n.end());
    if (key == n || key == std::to_string(spec.index)) return spec;
  }
  return std::nullopt;
}

int quantizer_bits(const CodecSpec &spec, int sample_rate) {
  const double spf = static_cast<double>(samples_per_frame(spec, sample_rate));
  const double raw = spec.bitrate_kbps * 1000.0 * (spec.frame_ms / 1000.0) / spf;
  return static_cast<int>(std::floor(std::clamp(raw, 2.0, 15.0)));
}

AudioBuffer simulate_codec(const AudioBuffer &audio, const CodecSpec &spec) {
  validate(spec);
  if (spec.backend != CodecBackend::Builtin)
    throw Error(ErrorCode::BadSpec, spec.name + ": simulate_codec requires the builtin backend");
  const int rate = audio.sample_rate > 0 ? audio.sample_rate : kPipelineRate;
  const std::size_t n = audio.samples.size();
  std::vector<double> x(audio.samples.begin(), audio.samples.end());

  const double cutoff = spec.bandwidth_hz / rate;
  const bool full_band = cutoff >= 0.5;
  const auto h = dsp::design_lowpass(cutoff, kLowpassTaps);
  auto band_limit = [&](const std::vector<double> &v) { return full_band ? v : dsp::filter_centered(v, h); };

  const std::vector<double> y = band_limit(x);
  const int bits = quantizer_bits(spec, rate);
  const std::size_t spf = samples_per_frame(spec, rate);

  auto render = [&](int b) {
    std::vector<double> q = y;
    if (b < 15) {
      const double levels = std::ldexp(1.0, b - 1);
      const double log_mu = std::log1p(kMu);
      for (std::size_t start = 0; start < n; start += spf) {
        const std::size_t end = std::min(n, start + spf);
        double peak = 0.0;
        for (std::size_t i = start; i < end; ++i) peak = std::max(peak, std::abs(y[i]));
        for (std::size_t i = start; i < end; ++i) {
          if (peak == 0.0) {
            q[i] = 0.0;
            continue;
          }
          const double v = y[i] / peak;
          const double c = std::copysign(std::log1p(kMu * std::abs(v)) / log_mu, v);
          const double qc = std::round(c * levels) / levels;
          q[i] = std::copysign(std::expm1(std::abs(qc) * log_mu) / kMu, qc) * peak;
        }
      }
    }

    std::vector<double> z = band_limit(q);
    for (std::size_t start = 0; start < n; start += spf) {
      const std::size_t end = std::min(n, start + spf);
      double e_ref = 0.0, e_out = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        e_ref += y[i] * y[i];
        e_out += z[i] * z[i];
      }
      if (e_out > e_ref) {
        const double g = e_out > 0.0 ? std::sqrt(e_ref / e_out) : 0.0;
        for (std::size_t i = start; i < end; ++i) z[i] *= g;
      }
    }
    // Truncate toward zero so rounding can never push a sample past its
    // unrounded magnitude.
    std::vector<std::int16_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = clamp_to_i16(std::trunc(z[i]));
    return out;
  };

  AudioBuffer out;
  out.sample_rate = rate;
  out.samples = render(bits);
  // Analysis by synthesis: each frame keeps the closest reconstruction among
  // all bit depths the budget affords, so more bits never cost fidelity.
  for (int b = bits - 1; b >= 2; --b) {
    const std::vector<std::int16_t> alt = render(b);
    for (std::size_t start = 0; start < n; start += spf) {
      const std::size_t end = std::min(n, start + spf);
      double e_cur = 0.0, e_alt = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const double dc = static_cast<double>(out.samples[i]) - audio.samples[i];
        const double da = static_cast<double>(alt[i]) - audio.samples[i];
        e_cur += dc * dc;
        e_alt += da * da;
      }
      if (e_alt < e_cur) std::copy(alt.begin() + start, alt.begin() + end, out.samples.begin() + start);
    }
  }
  return out;
}

void validate(const ExternalCodecTemplate &tmpl) {
  for (const auto *cmd : {&tmpl.encode_cmd, &tmpl.decode_cmd}) {
    if (count_of(*cmd, "{in}") != 1 || count_of(*cmd, "{out}") != 1)
      throw Error(ErrorCode::BadSpec, "codec command must contain {in} and {out} exactly once: '" + *cmd + "'");
  }
}

void set_external_codec_concurrency(unsigned cap) { limiter().set_cap(cap); }

AudioBuffer external_codec_roundtrip(const AudioBuffer &audio, const CodecSpec &spec,
                                     const ExternalCodecTemplate &tmpl, const std::string &scratch_key) {
  validate(tmpl);
  static std::atomic<std::uint64_t> counter{0};
  std::string key = scratch_key;
  if (key.empty()) {
    std::ostringstream os;
    os << std::hex << ::getpid() << '_' << counter.fetch_add(1);
    key = os.str();
  }
  std::filesystem::path dir = tmpl.work_dir.empty() ? std::filesystem::temp_directory_path() : tmpl.work_dir;
  std::filesystem::create_directories(dir);
  const std::string stem = sanitize(key) + "_" + sanitize(spec.name);
  const auto in_wav = dir / (stem + ".in.wav");
  const auto bitstream = dir / (stem + ".bit");
  const auto out_wav = dir / (stem + ".out.wav");

  struct Cleanup {
    std::vector<std::filesystem::path> files;
    ~Cleanup() {
      std::error_code ec;
      for (const auto &f : files) std::filesystem::remove(f, ec);
    }
  } cleanup{{in_wav, bitstream, out_wav}};

  write_wave(in_wav, audio);
  std::ostringstream bitrate;
  bitrate << static_cast<long long>(std::llround(spec.bitrate_kbps * 1000.0));
  auto expand = [&](const std::string &cmd, const std::filesystem::path &in, const std::filesystem::path &out) {
    std::string c = substitute(cmd, "{in}", shell_quote(in.string()));
    c = substitute(c, "{out}", shell_quote(out.string()));
    return substitute(c, "{bitrate}", bitrate.str());
  };
  run_tool(expand(tmpl.encode_cmd, in_wav, bitstream));
  run_tool(expand(tmpl.decode_cmd, bitstream, out_wav));

  AudioBuffer decoded;
  try {
    decoded = normalize_audio(read_wave(out_wav));
  } catch (const Error &e) {
    throw Error(ErrorCode::OutputUnreadable, out_wav.string() + " (" + e.what() + ")");
  }
  return fix_length(decoded, audio.samples.size());
}

AudioBuffer apply_codec(const AudioBuffer &audio, const CodecSpec &spec, const ExternalCodecTemplate *tmpl,
                        const std::string &scratch_key) {
  if (spec.backend == CodecBackend::Builtin) return simulate_codec(audio, spec);
  if (tmpl == nullptr) throw Error(ErrorCode::BadSpec, spec.name + ": external backend without command template");
  return external_codec_roundtrip(audio, spec, *tmpl, scratch_key);
}

}  // namespace addbench
