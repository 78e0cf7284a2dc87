// src/synth.cpp

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

#include "addbench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "addbench/rng.hpp"

namespace addbench {

namespace {

// Two-pole resonator at `freq` with -3 dB bandwidth `bw`.
class Resonator {
 public:
  Resonator(double freq, double bw, double rate) {
    const double r = std::exp(-std::numbers::pi * bw / rate);
    a1_ = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / rate);
    a2_ = -r * r;
    gain_ = 1.0 - r;
  }
  double operator()(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_, a2_, gain_;
  double y1_ = 0.0, y2_ = 0.0;
};

}  // namespace

AudioBuffer synth_utterance(Label label, std::uint64_t seed) {
  Rng rng(seed);
  const bool fake = label == Label::Fake;
  const double rate = kPipelineRate;
  const auto n = static_cast<std::size_t>(rng.uniform(3.0, 5.0) * rate);
  const double f0 = rng.uniform(90.0, 220.0);
  const double vib_rate = rng.uniform(0.3, 0.9), vib_phase = rng.uniform(0.0, 6.28);
  const double syl_rate = rng.uniform(3.0, 5.0), syl_phase = rng.uniform(0.0, 6.28);
  const double f1 = rng.uniform(450.0, 800.0), f2 = rng.uniform(1100.0, 2100.0), f3 = rng.uniform(2400.0, 3200.0);
  const double bw_scale = fake ? 2.2 : 1.0;
  Resonator r1(f1, 80.0 * bw_scale, rate), r2(f2, 110.0 * bw_scale, rate), r3(f3, 160.0 * bw_scale, rate);
  Resonator hf(fake ? 7000.0 : 5200.0, 900.0, rate);

  std::vector<double> y(n);
  double phase = 0.0;
  double jitter = 0.0, shimmer = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double pitch = f0 * (1.0 + 0.04 * std::sin(2.0 * std::numbers::pi * vib_rate * t + vib_phase));
    phase += pitch * (1.0 + jitter) / rate;
    double excitation = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      excitation = shimmer;
      if (!fake) {
        jitter = 0.02 * rng.normal();
        shimmer = 1.0 + 0.15 * rng.normal();
      }
    }
    const double env = std::pow(std::abs(std::sin(std::numbers::pi * syl_rate * t + syl_phase)), 0.6);
    const double noise = rng.normal();
    double v = r3(r2(r1(excitation * 40.0)));
    v += (fake ? 0.0 : 0.004) * noise;          // breath
    v += (fake ? 0.06 : 0.015) * hf(noise) * env;  // high-band residue
    y[i] = v * env;
  }
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.0 ? rng.uniform(0.3, 0.8) * 32767.0 / peak : 0.0;
  AudioBuffer out;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = clamp_to_i16(y[i] * gain);
  return out;
}

Manifest generate_demo_corpus(const std::filesystem::path &dir, const DemoCorpusOptions &opts) {
  std::vector<Utterance> entries;
  for (Label label : {Label::Bonafide, Label::Fake}) {
    for (std::size_t i = 0; i < opts.per_class; ++i) {
      Utterance u;
      const auto &source = opts.sources[i % opts.sources.size()];
      u.id = std::string(label == Label::Bonafide ? "bona" : "fake") + "_" + std::to_string(i);
      u.label = label;
      u.source_dataset = source;
      if (label == Label::Fake)
        u.algorithm = source + "_alg" + std::to_string((i / opts.sources.size()) % opts.algorithms_per_source);
      u.path = dir / "wav" / (u.id + ".wav");
      write_wave(u.path, synth_utterance(label, stable_hash(u.id, opts.seed)));
      entries.push_back(std::move(u));
    }
  }
  Manifest m(std::move(entries));
  write_manifest(dir / "manifest.csv", m);
  return m;
}

}  // namespace addbench
