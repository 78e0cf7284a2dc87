// tests/TestUtils.hpp

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

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "addbench/audio.hpp"
#include "addbench/rng.hpp"

namespace addbench::test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("addbench_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline AudioBuffer sine(double hz, double amplitude, std::size_t n = kUtteranceLength, int rate = kPipelineRate) {
  AudioBuffer a;
  a.sample_rate = rate;
  a.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    a.samples[i] = clamp_to_i16(amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate));
  return a;
}

inline AudioBuffer white_noise(std::uint64_t seed, double amplitude, std::size_t n = kUtteranceLength) {
  Rng rng(seed);
  AudioBuffer a;
  a.samples.resize(n);
  for (auto &s : a.samples) s = clamp_to_i16(rng.uniform(-amplitude, amplitude));
  return a;
}

inline AudioBuffer constant(std::int16_t v, std::size_t n = kUtteranceLength) {
  AudioBuffer a;
  a.samples.assign(n, v);
  return a;
}

inline double rms(const std::vector<std::int16_t> &x) {
  double s = 0.0;
  for (auto v : x) s += static_cast<double>(v) * v;
  return x.empty() ? 0.0 : std::sqrt(s / static_cast<double>(x.size()));
}

/// Direct O(N^2) DFT power of a Hann-windowed segment; bin k is k*rate/N Hz.
inline std::vector<double> dft_power(const std::vector<std::int16_t> &x, std::size_t start, std::size_t n) {
  std::vector<double> seg(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    seg[i] = w * x[start + i];
  }
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    const double step = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) acc += seg[i] * std::polar(1.0, step * static_cast<double>(i));
    p[k] = std::norm(acc);
  }
  return p;
}

inline std::string read_bytes(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace addbench::test
