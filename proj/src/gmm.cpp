// src/gmm.cpp

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
#include <limits>
#include <numbers>

#include "addbench/detector.hpp"
#include "addbench/error.hpp"
#include "addbench/rng.hpp"

namespace addbench {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Per-component constant log(w_k) - 0.5 * sum_d log(2 pi var_kd).
std::vector<double> component_constants(const DiagGmm &g) {
  std::vector<double> c(g.components);
  for (std::size_t k = 0; k < g.components; ++k) {
    double acc = 0.0;
    for (std::size_t d = 0; d < g.dim; ++d) acc += kLog2Pi + std::log(g.variances[k * g.dim + d]);
    c[k] = (g.weights[k] > 0.0 ? std::log(g.weights[k]) : -std::numeric_limits<double>::infinity()) - 0.5 * acc;
  }
  return c;
}

// Fills per-component log joint densities; returns log p(x).
double log_joint(const DiagGmm &g, const std::vector<double> &constants, const std::vector<double> &inv_var,
                 std::span<const double> x, std::vector<double> &out) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < g.components; ++k) {
    const double *mu = &g.means[k * g.dim];
    const double *iv = &inv_var[k * g.dim];
    double q = 0.0;
    for (std::size_t d = 0; d < g.dim; ++d) {
      const double diff = x[d] - mu[d];
      q += diff * diff * iv[d];
    }
    out[k] = constants[k] - 0.5 * q;
    best = std::max(best, out[k]);
  }
  if (!std::isfinite(best)) return best;
  double sum = 0.0;
  for (std::size_t k = 0; k < g.components; ++k) sum += std::exp(out[k] - best);
  return best + std::log(sum);
}

std::vector<double> inverse_variances(const DiagGmm &g) {
  std::vector<double> iv(g.variances.size());
  for (std::size_t i = 0; i < iv.size(); ++i) iv[i] = 1.0 / g.variances[i];
  return iv;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

}  // namespace

double DiagGmm::log_density(std::span<const double> x) const {
  const auto c = component_constants(*this);
  const auto iv = inverse_variances(*this);
  std::vector<double> tmp(components);
  return log_joint(*this, c, iv, x, tmp);
}

GmmFitResult gmm_fit(const std::vector<std::vector<double>> &frames, const GmmFitOptions &opts) {
  const std::size_t n = frames.size();
  const std::size_t k_count = opts.components;
  if (k_count == 0) throw Error(ErrorCode::BadParams, "components must be > 0");
  if (n < k_count)
    throw Error(ErrorCode::TooFewFrames, std::to_string(n) + " frames for " + std::to_string(k_count) + " components");
  const std::size_t dim = frames.front().size();
  for (const auto &f : frames)
    if (f.size() != dim) throw Error(ErrorCode::DimMismatch, "inconsistent frame dimension");

  DiagGmm g;
  g.components = k_count;
  g.dim = dim;
  g.weights.assign(k_count, 1.0 / static_cast<double>(k_count));
  g.means.assign(k_count * dim, 0.0);
  g.variances.assign(k_count * dim, 0.0);

  // Global statistics seed every component's variance.
  std::vector<double> gmean(dim, 0.0), gvar(dim, 0.0);
  for (const auto &f : frames)
    for (std::size_t d = 0; d < dim; ++d) gmean[d] += f[d];
  for (auto &m : gmean) m /= static_cast<double>(n);
  for (const auto &f : frames)
    for (std::size_t d = 0; d < dim; ++d) gvar[d] += (f[d] - gmean[d]) * (f[d] - gmean[d]);
  for (auto &v : gvar) v = std::max(v / static_cast<double>(n), opts.variance_floor);

  // k-means++ seeding.
  Rng rng(opts.seed);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t chosen = static_cast<std::size_t>(rng.below(n));
  for (std::size_t k = 0; k < k_count; ++k) {
    std::copy(frames[chosen].begin(), frames[chosen].end(), g.means.begin() + static_cast<long>(k * dim));
    std::copy(gvar.begin(), gvar.end(), g.variances.begin() + static_cast<long>(k * dim));
    if (k + 1 == k_count) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_dist(frames[i], frames[chosen]));
      total += nearest[i];
    }
    if (total <= 0.0) {
      chosen = static_cast<std::size_t>(rng.below(n));
      continue;
    }
    double target = rng.uniform() * total;
    chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      target -= nearest[i];
      if (target < 0.0) {
        chosen = i;
        break;
      }
    }
  }

  GmmFitResult result;
  std::vector<double> post(k_count);
  std::vector<double> occ(k_count), sum_x(k_count * dim), sum_xx(k_count * dim);
  for (std::size_t iter = 0;; ++iter) {
    // E-step with fixed-order accumulation.
    const auto constants = component_constants(g);
    const auto inv_var = inverse_variances(g);
    std::fill(occ.begin(), occ.end(), 0.0);
    std::fill(sum_x.begin(), sum_x.end(), 0.0);
    std::fill(sum_xx.begin(), sum_xx.end(), 0.0);
    double total_ll = 0.0;
    for (const auto &x : frames) {
      const double ll = log_joint(g, constants, inv_var, x, post);
      total_ll += ll;
      for (std::size_t k = 0; k < k_count; ++k) {
        const double r = std::exp(post[k] - ll);
        if (r == 0.0) continue;
        occ[k] += r;
        double *sx = &sum_x[k * dim];
        double *sxx = &sum_xx[k * dim];
        for (std::size_t d = 0; d < dim; ++d) {
          sx[d] += r * x[d];
          sxx[d] += r * x[d] * x[d];
        }
      }
    }
    const double avg_ll = total_ll / static_cast<double>(n);
    const bool converged = !result.trace.empty() && avg_ll - result.trace.back() < opts.tolerance;
    result.trace.push_back(avg_ll);
    if (converged || iter >= opts.max_iterations) break;

    // M-step. Components with no occupancy keep their parameters.
    double occ_total = 0.0;
    for (double o : occ) occ_total += o;
    for (std::size_t k = 0; k < k_count; ++k) {
      g.weights[k] = occ[k] / occ_total;
      if (occ[k] <= 1e-10) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        const double mu = sum_x[k * dim + d] / occ[k];
        // Two-moment variance; the floor also absorbs cancellation error.
        const double var = sum_xx[k * dim + d] / occ[k] - mu * mu;
        g.means[k * dim + d] = mu;
        g.variances[k * dim + d] = std::max(var, opts.variance_floor);
      }
    }
  }
  result.model = std::move(g);
  return result;
}

double gmm_score(const GmmModel &model, const FeatureMatrix &f) {
  if (f.kind != model.kind)
    throw Error(ErrorCode::KindMismatch, std::string("model expects ") + std::string(to_string(model.kind)) +
                                             ", got " + std::string(to_string(f.kind)));
  if (f.dim != model.bonafide.dim || f.dim != model.fake.dim)
    throw Error(ErrorCode::DimMismatch, "feature dim " + std::to_string(f.dim));
  if (f.frames == 0) return 0.0;
  const auto cb = component_constants(model.bonafide), cf = component_constants(model.fake);
  const auto ib = inverse_variances(model.bonafide), iff = inverse_variances(model.fake);
  std::vector<double> tb(model.bonafide.components), tf(model.fake.components);
  double acc = 0.0;
  for (std::size_t t = 0; t < f.frames; ++t) {
    const auto x = f.column(t);
    acc += log_joint(model.bonafide, cb, ib, x, tb) - log_joint(model.fake, cf, iff, x, tf);
  }
  return acc / static_cast<double>(f.frames);
}

GmmModel gmm_train(const std::vector<std::pair<FeatureMatrix, Label>> &data, const GmmFitOptions &opts,
                   std::size_t max_frames_per_class) {
  if (data.empty()) throw Error(ErrorCode::ClassMissing, "no training data");
  GmmModel model;
  model.kind = data.front().first.kind;
  for (Label label : {Label::Bonafide, Label::Fake}) {
    std::vector<std::vector<double>> frames;
    for (const auto &[f, l] : data) {
      if (l != label) continue;
      if (f.kind != model.kind) throw Error(ErrorCode::KindMismatch, "mixed feature kinds in training data");
      for (std::size_t t = 0; t < f.frames; ++t) frames.push_back(f.column(t));
    }
    if (frames.empty()) throw Error(ErrorCode::ClassMissing, std::string(to_string(label)));
    if (max_frames_per_class > 0 && frames.size() > max_frames_per_class) {
      Rng rng(hash_combine(opts.seed, label == Label::Bonafide ? 11 : 13));
      rng.shuffle(frames);
      frames.resize(max_frames_per_class);
    }
    GmmFitOptions o = opts;
    o.seed = hash_combine(opts.seed, label == Label::Bonafide ? 1 : 2);
    auto fit = gmm_fit(frames, o);
    (label == Label::Bonafide ? model.bonafide : model.fake) = std::move(fit.model);
  }
  return model;
}

GmmModel swap_classes(const GmmModel &model) {
  GmmModel out = model;
  std::swap(out.bonafide, out.fake);
  return out;
}

}  // namespace addbench
