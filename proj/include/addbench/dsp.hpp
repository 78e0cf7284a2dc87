// include/addbench/dsp.hpp

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

#include <complex>
#include <span>
#include <vector>

namespace addbench::dsp {

/// In-place iterative radix-2 FFT; data.size() must be a power of two.
void fft(std::vector<std::complex<double>> &data, bool inverse = false);

/// |X[k]|^2 for k = 0..n/2 of a real frame zero-padded to `n_fft`.
std::vector<double> power_spectrum(std::span<const double> frame, std::size_t n_fft);

std::vector<double> hamming(std::size_t n);

/// Linear-phase low-pass FIR (Blackman-windowed sinc), odd length `taps`,
/// `cutoff` as a fraction of the sample rate (0 < cutoff <= 0.5). At
/// cutoff = 0.5 the design reduces to a unit impulse.
std::vector<double> design_lowpass(double cutoff, std::size_t taps);

/// Zero-phase application of an odd-length symmetric FIR: the (taps-1)/2
/// group delay is removed, so output[i] aligns with input[i].
std::vector<double> filter_centered(std::span<const double> x, std::span<const double> h);

/// Orthonormal DCT-II basis, `n_out` x `n_in`, row-major.
class Dct {
 public:
  Dct(std::size_t n_in, std::size_t n_out);

  std::vector<double> forward(std::span<const double> x) const;
  /// Orthonormal DCT-III; exact inverse of forward() when n_out == n_in.
  std::vector<double> inverse(std::span<const double> c) const;

  std::size_t n_in() const { return n_in_; }
  std::size_t n_out() const { return n_out_; }

 private:
  std::size_t n_in_, n_out_;
  std::vector<double> basis_;
};

}  // namespace addbench::dsp
