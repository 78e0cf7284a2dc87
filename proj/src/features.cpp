// src/features.cpp

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

#include "addbench/features.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

#include "addbench/dsp.hpp"
#include "addbench/error.hpp"

namespace addbench {

namespace {

constexpr std::size_t kLfccFft = 1024;
constexpr double kNyquist = kPipelineRate / 2.0;

void require_length(const AudioBuffer &audio, const char *what) {
  if (audio.samples.size() != kUtteranceLength)
    throw Error(ErrorCode::BadLength, std::string(what) + " expects " + std::to_string(kUtteranceLength) +
                                          " samples, got " + std::to_string(audio.samples.size()));
}

std::vector<double> scaled(const AudioBuffer &audio) {
  std::vector<double> x(audio.samples.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = audio.samples[i] / 32768.0;
  return x;
}

double safe_log(double v) { return std::log(std::max(v, kLogFloor)); }

FeatureMatrix cepstra(const FeatureMatrix &log_spec, FeatureKind kind) {
  const dsp::Dct dct(log_spec.dim, kStaticCoeffs);
  FeatureMatrix stat(kind, kStaticCoeffs, log_spec.frames);
  for (std::size_t t = 0; t < log_spec.frames; ++t) {
    auto c = dct.forward(log_spec.column(t));
    for (std::size_t d = 0; d < kStaticCoeffs; ++d) stat.at(d, t) = c[d];
  }
  return deltas(stat);
}

struct CqtKernel {
  std::size_t length;
  std::vector<double> re, im;
};

struct CqtTables {
  std::vector<double> freqs;
  std::vector<CqtKernel> kernels;
  std::size_t max_half = 0;
};

const CqtTables &cqt_tables() {
  static const CqtTables tables = [] {
    CqtTables t;
    const double q = 1.0 / (std::exp2(1.0 / kCqtBinsPerOctave) - 1.0);
    for (std::size_t k = 0; k < kCqtBins; ++k) {
      const double f = kCqtMinHz * std::exp2(static_cast<double>(k) / kCqtBinsPerOctave);
      t.freqs.push_back(f);
      CqtKernel ker;
      ker.length = static_cast<std::size_t>(std::ceil(kPipelineRate * q / f));
      ker.re.resize(ker.length);
      ker.im.resize(ker.length);
      const double half = static_cast<double>(ker.length) / 2.0;
      double wsum = 0.0;
      std::vector<double> w(ker.length);
      for (std::size_t n = 0; n < ker.length; ++n) {
        w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (static_cast<double>(n) + 0.5) /
                                    static_cast<double>(ker.length));
        wsum += w[n];
      }
      for (std::size_t n = 0; n < ker.length; ++n) {
        const double ph = -2.0 * std::numbers::pi * f * (static_cast<double>(n) - half) / kPipelineRate;
        ker.re[n] = w[n] / wsum * std::cos(ph);
        ker.im[n] = w[n] / wsum * std::sin(ph);
      }
      t.max_half = std::max(t.max_half, ker.length / 2 + 1);
      t.kernels.push_back(std::move(ker));
    }
    return t;
  }();
  return tables;
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Lfcc: return "lfcc";
    case FeatureKind::Cqcc: return "cqcc";
    case FeatureKind::Raw: return "raw";
  }
  return "lfcc";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view text) {
  if (text == "lfcc") return FeatureKind::Lfcc;
  if (text == "cqcc") return FeatureKind::Cqcc;
  if (text == "raw") return FeatureKind::Raw;
  return std::nullopt;
}

std::vector<double> FeatureMatrix::column(std::size_t t) const {
  std::vector<double> c(dim);
  for (std::size_t d = 0; d < dim; ++d) c[d] = at(d, t);
  return c;
}

std::size_t reflect_index(long long i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<long long>(2 * (n - 1));
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<long long>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

std::vector<std::vector<double>> frame_signal(const AudioBuffer &audio, const FrameGrid &grid) {
  if (grid.hop == 0 || grid.window_len == 0) throw Error(ErrorCode::BadGrid, "hop and window_len must be > 0");
  if (audio.samples.empty()) throw Error(ErrorCode::BadLength, "empty signal");
  const auto x = scaled(audio);
  const auto w = dsp::hamming(grid.window_len);
  const std::size_t n = x.size();
  const std::size_t n_frames = grid.n_frames(n);
  const auto half = static_cast<long long>(grid.window_len / 2);
  std::vector<std::vector<double>> frames(n_frames, std::vector<double>(grid.window_len));
  for (std::size_t t = 0; t < n_frames; ++t) {
    const long long start = static_cast<long long>(t * grid.hop) - half;
    for (std::size_t i = 0; i < grid.window_len; ++i)
      frames[t][i] = x[reflect_index(start + static_cast<long long>(i), n)] * w[i];
  }
  return frames;
}

const std::vector<std::vector<double>> &lfcc_filterbank() {
  static const std::vector<std::vector<double>> bank = [] {
    const std::size_t n_bins = kLfccFft / 2 + 1;
    std::vector<double> edges(kLfccFilters + 2);
    for (std::size_t j = 0; j < edges.size(); ++j)
      edges[j] = kNyquist * static_cast<double>(j) / static_cast<double>(kLfccFilters + 1);
    std::vector<std::vector<double>> fb(kLfccFilters, std::vector<double>(n_bins, 0.0));
    for (std::size_t m = 0; m < kLfccFilters; ++m) {
      const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
      for (std::size_t k = 0; k < n_bins; ++k) {
        const double f = static_cast<double>(k) * kPipelineRate / static_cast<double>(kLfccFft);
        if (f > lo && f < mid) fb[m][k] = (f - lo) / (mid - lo);
        else if (f >= mid && f < hi) fb[m][k] = (hi - f) / (hi - mid);
      }
    }
    return fb;
  }();
  return bank;
}

std::vector<double> lfcc_filter_centers() {
  std::vector<double> c(kLfccFilters);
  for (std::size_t m = 0; m < kLfccFilters; ++m)
    c[m] = kNyquist * static_cast<double>(m + 1) / static_cast<double>(kLfccFilters + 1);
  return c;
}

FeatureMatrix lfcc_filterbank_energies(const AudioBuffer &audio) {
  require_length(audio, "lfcc");
  const auto frames = frame_signal(audio, kLfccGrid);
  const auto &fb = lfcc_filterbank();
  FeatureMatrix e(FeatureKind::Lfcc, kLfccFilters, frames.size());
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const auto p = dsp::power_spectrum(frames[t], kLfccFft);
    for (std::size_t m = 0; m < kLfccFilters; ++m) {
      double acc = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) acc += fb[m][k] * p[k];
      e.at(m, t) = acc;
    }
  }
  return e;
}

FeatureMatrix lfcc(const AudioBuffer &audio) {
  FeatureMatrix e = lfcc_filterbank_energies(audio);
  for (auto &v : e.data) v = safe_log(v);
  return cepstra(e, FeatureKind::Lfcc);
}

std::vector<double> cqt_bin_frequencies() { return cqt_tables().freqs; }

FeatureMatrix constant_q_power(const AudioBuffer &audio) {
  require_length(audio, "cqcc");
  const auto &tables = cqt_tables();
  const auto x = scaled(audio);
  const std::size_t n = x.size();
  const std::size_t pad = tables.max_half + 1;
  std::vector<double> padded(n + 2 * pad);
  for (std::size_t i = 0; i < padded.size(); ++i)
    padded[i] = x[reflect_index(static_cast<long long>(i) - static_cast<long long>(pad), n)];

  const std::size_t n_frames = kCqccGrid.n_frames(n);
  FeatureMatrix power(FeatureKind::Cqcc, kCqtBins, n_frames);
  for (std::size_t k = 0; k < kCqtBins; ++k) {
    const auto &ker = tables.kernels[k];
    const std::size_t half = ker.length / 2;
    for (std::size_t t = 0; t < n_frames; ++t) {
      const double *s = padded.data() + pad + t * kCqccGrid.hop - half;
      std::array<double, 4> re{}, im{};
      std::size_t i = 0;
      for (; i + 4 <= ker.length; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
          re[j] += s[i + j] * ker.re[i + j];
          im[j] += s[i + j] * ker.im[i + j];
        }
      }
      double r = (re[0] + re[1]) + (re[2] + re[3]);
      double m = (im[0] + im[1]) + (im[2] + im[3]);
      for (; i < ker.length; ++i) {
        r += s[i] * ker.re[i];
        m += s[i] * ker.im[i];
      }
      power.at(k, t) = r * r + m * m;
    }
  }
  return power;
}

FeatureMatrix cqcc(const AudioBuffer &audio) {
  const FeatureMatrix power = constant_q_power(audio);
  const auto &freqs = cqt_tables().freqs;
  // Linear interpolation of the log spectrum onto a uniform frequency grid.
  std::vector<std::size_t> left(kCqccUniformPoints);
  std::vector<double> frac(kCqccUniformPoints);
  const double f_lo = freqs.front(), f_hi = freqs.back();
  for (std::size_t u = 0; u < kCqccUniformPoints; ++u) {
    const double f = f_lo + (f_hi - f_lo) * static_cast<double>(u) / static_cast<double>(kCqccUniformPoints - 1);
    auto it = std::upper_bound(freqs.begin(), freqs.end(), f);
    std::size_t j = it == freqs.begin() ? 0 : static_cast<std::size_t>(it - freqs.begin()) - 1;
    j = std::min(j, freqs.size() - 2);
    left[u] = j;
    frac[u] = std::clamp((f - freqs[j]) / (freqs[j + 1] - freqs[j]), 0.0, 1.0);
  }
  FeatureMatrix uniform(FeatureKind::Cqcc, kCqccUniformPoints, power.frames);
  for (std::size_t t = 0; t < power.frames; ++t) {
    for (std::size_t u = 0; u < kCqccUniformPoints; ++u) {
      const double a = safe_log(power.at(left[u], t));
      const double b = safe_log(power.at(left[u] + 1, t));
      uniform.at(u, t) = a + (b - a) * frac[u];
    }
  }
  return cepstra(uniform, FeatureKind::Cqcc);
}

FeatureMatrix deltas(const FeatureMatrix &s) {
  const std::size_t d = s.dim, n = s.frames;
  FeatureMatrix out(s.kind, 3 * d, n);
  auto regress = [n](auto &&get, auto &&put) {
    constexpr double denom = 2.0 * (1.0 + 4.0);
    for (std::size_t t = 0; t < n; ++t) {
      double acc = 0.0;
      for (long k = 1; k <= 2; ++k) {
        const auto ti = static_cast<long>(t);
        const std::size_t fwd = static_cast<std::size_t>(std::min<long>(ti + k, static_cast<long>(n) - 1));
        const std::size_t bwd = static_cast<std::size_t>(std::max<long>(ti - k, 0));
        acc += static_cast<double>(k) * (get(fwd) - get(bwd));
      }
      put(t, acc / denom);
    }
  };
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t t = 0; t < n; ++t) out.at(r, t) = s.at(r, t);
    regress([&](std::size_t t) { return s.at(r, t); }, [&](std::size_t t, double v) { out.at(d + r, t) = v; });
    regress([&](std::size_t t) { return out.at(d + r, t); },
            [&](std::size_t t, double v) { out.at(2 * d + r, t) = v; });
  }
  return out;
}

FeatureMatrix raw_view(const AudioBuffer &audio) {
  require_length(audio, "raw");
  FeatureMatrix f(FeatureKind::Raw, 1, audio.samples.size());
  for (std::size_t i = 0; i < audio.samples.size(); ++i) f.data[i] = audio.samples[i] / 32768.0;
  return f;
}

FeatureMatrix extract_features(FeatureKind kind, const AudioBuffer &audio) {
  switch (kind) {
    case FeatureKind::Lfcc: return lfcc(audio);
    case FeatureKind::Cqcc: return cqcc(audio);
    case FeatureKind::Raw: return raw_view(audio);
  }
  throw Error(ErrorCode::BadGrid, "unknown feature kind");
}

std::vector<double> pool_stats(const FeatureMatrix &f) {
  std::vector<double> out(2 * f.dim, 0.0);
  if (f.frames == 0) return out;
  const double n = static_cast<double>(f.frames);
  for (std::size_t d = 0; d < f.dim; ++d) {
    double mean = 0.0;
    for (double v : f.row(d)) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : f.row(d)) var += (v - mean) * (v - mean);
    out[d] = mean;
    out[f.dim + d] = std::sqrt(var / n);
  }
  return out;
}

namespace {

void put_u32(std::ofstream &out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 4);
}

std::uint32_t get_u32(const unsigned char *p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
}

constexpr char kFeatureMagic[4] = {'A', 'D', 'D', 'F'};

}  // namespace

void write_feature_file(const std::filesystem::path &path, const FeatureMatrix &f) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::BadCache, "cannot write " + path.string());
  out.write(kFeatureMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(f.kind));
  put_u32(out, static_cast<std::uint32_t>(f.dim));
  put_u32(out, static_cast<std::uint32_t>(f.frames));
  for (double v : f.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

FeatureMatrix read_feature_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::array<unsigned char, 16> header{};
  if (!in.read(reinterpret_cast<char *>(header.data()), 16) || std::memcmp(header.data(), kFeatureMagic, 4) != 0)
    throw Error(ErrorCode::BadCache, path.string() + ": bad header");
  const auto kind = get_u32(header.data() + 4);
  if (kind < 1 || kind > 3) throw Error(ErrorCode::BadCache, path.string() + ": bad kind");
  FeatureMatrix f(static_cast<FeatureKind>(kind), get_u32(header.data() + 8), get_u32(header.data() + 12));
  std::vector<unsigned char> body(f.data.size() * 4);
  if (!in.read(reinterpret_cast<char *>(body.data()), static_cast<std::streamsize>(body.size())))
    throw Error(ErrorCode::BadCache, path.string() + ": truncated");
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = std::bit_cast<float>(get_u32(body.data() + 4 * i));
  return f;
}

bool feature_file_valid(const std::filesystem::path &path, FeatureKind expected) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size < 16) return false;
  std::ifstream in(path, std::ios::binary);
  std::array<unsigned char, 16> header{};
  if (!in.read(reinterpret_cast<char *>(header.data()), 16)) return false;
  if (std::memcmp(header.data(), kFeatureMagic, 4) != 0) return false;
  if (get_u32(header.data() + 4) != static_cast<std::uint32_t>(expected)) return false;
  const std::uint64_t cells = std::uint64_t(get_u32(header.data() + 8)) * get_u32(header.data() + 12);
  return size == 16 + 4 * cells;
}

}  // namespace addbench
