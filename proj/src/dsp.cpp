// src/dsp.cpp

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

#include "addbench/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace addbench::dsp {

void fft(std::vector<std::complex<double>> &a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly rather than by recurrence to avoid drift.
      const std::complex<double> w(std::cos(ang * static_cast<double>(k)),
                                   std::sin(ang * static_cast<double>(k)));
      for (std::size_t i = 0; i < n; i += len) {
        auto u = a[i + k];
        auto v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    for (auto &x : a) x /= static_cast<double>(n);
  }
}

std::vector<double> power_spectrum(std::span<const double> frame, std::size_t n_fft) {
  std::vector<std::complex<double>> buf(n_fft);
  for (std::size_t i = 0; i < frame.size() && i < n_fft; ++i) buf[i] = frame[i];
  fft(buf);
  std::vector<double> p(n_fft / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(buf[k]);
  return p;
}

std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  // Periodic form, matching the usual STFT convention.
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

std::vector<double> design_lowpass(double cutoff, std::size_t taps) {
  if (taps % 2 == 0) ++taps;
  const auto m = static_cast<long>(taps / 2);
  std::vector<double> h(taps, 0.0);
  if (cutoff >= 0.5) {
    h[static_cast<std::size_t>(m)] = 1.0;
    return h;
  }
  double sum = 0.0;
  for (long i = -m; i <= m; ++i) {
    const double x = static_cast<double>(i);
    const double ideal = i == 0 ? 2.0 * cutoff
                                : std::sin(2.0 * std::numbers::pi * cutoff * x) / (std::numbers::pi * x);
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i + m) / static_cast<double>(taps - 1);
    const double w = 0.42 - 0.5 * std::cos(phase) + 0.08 * std::cos(2.0 * phase);
    h[static_cast<std::size_t>(i + m)] = ideal * w;
    sum += ideal * w;
  }
  for (auto &v : h) v /= sum;  // unity DC gain
  return h;
}

std::vector<double> filter_centered(std::span<const double> x, std::span<const double> h) {
  const auto n = static_cast<long>(x.size());
  const auto m = static_cast<long>(h.size() / 2);
  std::vector<double> y(x.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    const long k_lo = std::max(-m, i - n + 1);
    const long k_hi = std::min(m, i);
    for (long k = k_lo; k <= k_hi; ++k) acc += h[static_cast<std::size_t>(k + m)] * x[static_cast<std::size_t>(i - k)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

Dct::Dct(std::size_t n_in, std::size_t n_out) : n_in_(n_in), n_out_(n_out), basis_(n_in * n_out) {
  const double n = static_cast<double>(n_in);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t i = 0; i < n_in; ++i)
      basis_[k * n_in + i] =
          scale * std::cos(std::numbers::pi * (static_cast<double>(i) + 0.5) * static_cast<double>(k) / n);
  }
}

std::vector<double> Dct::forward(std::span<const double> x) const {
  std::vector<double> c(n_out_, 0.0);
  for (std::size_t k = 0; k < n_out_; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_in_; ++i) acc += basis_[k * n_in_ + i] * x[i];
    c[k] = acc;
  }
  return c;
}

std::vector<double> Dct::inverse(std::span<const double> c) const {
  std::vector<double> x(n_in_, 0.0);
  for (std::size_t k = 0; k < n_out_; ++k)
    for (std::size_t i = 0; i < n_in_; ++i) x[i] += basis_[k * n_in_ + i] * c[k];
  return x;
}

}  // namespace addbench::dsp
