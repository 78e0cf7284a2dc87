// include/addbench/detector.hpp

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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "addbench/corpus.hpp"
#include "addbench/features.hpp"

namespace addbench {

// ---------------------------------------------------------------------------
// Gaussian mixture back-end

/// Single-class diagonal-covariance mixture.
struct DiagGmm {
  std::size_t components = 0;
  std::size_t dim = 0;
  std::vector<double> weights;    // K
  std::vector<double> means;      // K x D row-major
  std::vector<double> variances;  // K x D row-major

  double log_density(std::span<const double> x) const;
  bool operator==(const DiagGmm &) const = default;
};

inline constexpr double kVarianceFloor = 1e-4;

struct GmmFitOptions {
  std::size_t components = 64;
  std::size_t max_iterations = 100;
  double tolerance = 1e-4;  // stop once the average log-likelihood gain drops below this
  double variance_floor = kVarianceFloor;
  std::uint64_t seed = 0;
};

struct GmmFitResult {
  DiagGmm model;
  /// Average per-frame log-likelihood at each EM iterate, starting from the
  /// k-means++ initialization.
  std::vector<double> trace;
};

/// k-means++ seeding followed by EM. Throws Error{TooFewFrames}.
GmmFitResult gmm_fit(const std::vector<std::vector<double>> &frames, const GmmFitOptions &opts);

/// Two-class model scored as a frame-averaged log-likelihood ratio.
struct GmmModel {
  FeatureKind kind = FeatureKind::Lfcc;
  DiagGmm bonafide;
  DiagGmm fake;

  bool operator==(const GmmModel &) const = default;
};

/// (1/T) * sum_t [log p(x_t | bonafide) - log p(x_t | fake)]. Higher means
/// more bonafide. Throws Error{KindMismatch} or Error{DimMismatch}.
double gmm_score(const GmmModel &model, const FeatureMatrix &f);

/// Collects frames per class (optionally a seeded subsample of at most
/// `max_frames_per_class`) and fits both mixtures.
GmmModel gmm_train(const std::vector<std::pair<FeatureMatrix, Label>> &data, const GmmFitOptions &opts,
                   std::size_t max_frames_per_class = 0);

GmmModel swap_classes(const GmmModel &model);

// ---------------------------------------------------------------------------
// Pooled-feature classifier

/// Binary cross-entropy averaged over J samples; predictions are clamped to
/// [1e-7, 1 - 1e-7]. Label 1 means fake. Throws Error{LengthMismatch}.
double cross_entropy(std::span<const double> labels, std::span<const double> predicted);

struct TrainConfig {
  std::size_t batch_size = 256;
  std::size_t epochs = 5;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t patience = 3;
  double val_fraction = 0.2;
  std::size_t hidden = 64;
  std::uint64_t seed = 0;
};

/// One hidden tanh layer, 2-way softmax (index 0 bonafide, 1 fake). Inputs
/// are standardized with statistics from the training split.
struct MlpModel {
  FeatureKind kind = FeatureKind::Lfcc;
  std::size_t input_dim = 0;
  std::size_t hidden = 0;
  std::vector<double> theta;  // W1 (H x In), b1 (H), W2 (2 x H), b2 (2)
  std::vector<double> mean;
  std::vector<double> scale;

  MlpModel() = default;
  MlpModel(FeatureKind k, std::size_t in, std::size_t h);

  std::size_t w1_offset() const { return 0; }
  std::size_t b1_offset() const { return hidden * input_dim; }
  std::size_t w2_offset() const { return b1_offset() + hidden; }
  std::size_t b2_offset() const { return w2_offset() + 2 * hidden; }

  /// Class probabilities {P(bonafide), P(fake)}.
  std::array<double, 2> predict(std::span<const double> pooled) const;

  bool operator==(const MlpModel &) const = default;
};

/// Mean binary cross-entropy of P(fake) over a batch, and its gradient
/// with respect to theta. `labels[j]` is 1 for fake.
double mlp_loss_and_gradient(const MlpModel &model, const std::vector<std::vector<double>> &inputs,
                             std::span<const double> labels, std::vector<double> *gradient);

/// Adam with bias correction.
class Adam {
 public:
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

/// Tracks validation loss; signals a stop after `patience` consecutive
/// epochs without improvement.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  /// Returns true when training should stop after this epoch.
  bool update(double val_loss);
  bool improved() const { return improved_; }
  std::size_t best_epoch() const { return best_epoch_; }  // 1-based
  double best_loss() const { return best_; }

 private:
  std::size_t patience_;
  std::size_t epoch_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_ = 0.0;
  bool improved_ = false;
};

struct EpochLog {
  std::size_t epoch;
  double train_loss;
  double val_loss;
};

struct MlpTrainResult {
  MlpModel model;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

/// Throws Error{ClassMissing} unless each class has at least 2 samples.
MlpTrainResult mlp_train(const std::vector<std::pair<std::vector<double>, Label>> &data, const TrainConfig &cfg,
                         FeatureKind kind = FeatureKind::Lfcc);

/// P(bonafide) - P(fake). Throws Error{DimMismatch}.
double mlp_score(const MlpModel &model, std::span<const double> pooled);

MlpModel swap_classes(const MlpModel &model);

// ---------------------------------------------------------------------------
// Model files: "ADDM", version, model kind, feature kind, dims, f64 params.

void write_model(const std::filesystem::path &path, const GmmModel &model);
void write_model(const std::filesystem::path &path, const MlpModel &model);

enum class ModelKind : std::uint32_t { Gmm = 1, Mlp = 2 };
ModelKind peek_model_kind(const std::filesystem::path &path);
GmmModel read_gmm_model(const std::filesystem::path &path);
MlpModel read_mlp_model(const std::filesystem::path &path);

}  // namespace addbench
