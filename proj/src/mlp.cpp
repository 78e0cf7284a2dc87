// src/mlp.cpp

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
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "addbench/detector.hpp"
#include "addbench/error.hpp"
#include "addbench/rng.hpp"
#include "addbench/split.hpp"

namespace addbench {

namespace {

constexpr double kProbClamp = 1e-7;

std::array<double, 2> softmax2(double a, double b) {
  const double m = std::max(a, b);
  const double ea = std::exp(a - m), eb = std::exp(b - m);
  const double s = ea + eb;
  return {ea / s, eb / s};
}

struct Forward {
  std::vector<double> z;       // standardized input
  std::vector<double> h;       // tanh activations
  std::array<double, 2> p{};   // class probabilities
};

Forward forward(const MlpModel &m, std::span<const double> x) {
  Forward f;
  f.z.resize(m.input_dim);
  for (std::size_t i = 0; i < m.input_dim; ++i) f.z[i] = (x[i] - m.mean[i]) / m.scale[i];
  f.h.resize(m.hidden);
  const double *w1 = m.theta.data() + m.w1_offset();
  const double *b1 = m.theta.data() + m.b1_offset();
  for (std::size_t j = 0; j < m.hidden; ++j) {
    double a = b1[j];
    for (std::size_t i = 0; i < m.input_dim; ++i) a += w1[j * m.input_dim + i] * f.z[i];
    f.h[j] = std::tanh(a);
  }
  const double *w2 = m.theta.data() + m.w2_offset();
  const double *b2 = m.theta.data() + m.b2_offset();
  double logit[2];
  for (std::size_t c = 0; c < 2; ++c) {
    double a = b2[c];
    for (std::size_t j = 0; j < m.hidden; ++j) a += w2[c * m.hidden + j] * f.h[j];
    logit[c] = a;
  }
  f.p = softmax2(logit[0], logit[1]);
  return f;
}

}  // namespace

double cross_entropy(std::span<const double> y, std::span<const double> p) {
  if (y.size() != p.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(y.size()) + " labels vs " + std::to_string(p.size()));
  if (y.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double q = std::clamp(p[j], kProbClamp, 1.0 - kProbClamp);
    acc += y[j] * std::log(q) + (1.0 - y[j]) * std::log(1.0 - q);
  }
  return -acc / static_cast<double>(y.size());
}

MlpModel::MlpModel(FeatureKind k, std::size_t in, std::size_t h)
    : kind(k), input_dim(in), hidden(h), theta(h * in + h + 2 * h + 2, 0.0), mean(in, 0.0), scale(in, 1.0) {}

std::array<double, 2> MlpModel::predict(std::span<const double> pooled) const {
  return forward(*this, pooled).p;
}

double mlp_loss_and_gradient(const MlpModel &m, const std::vector<std::vector<double>> &inputs,
                             std::span<const double> labels, std::vector<double> *gradient) {
  if (inputs.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "inputs vs labels");
  if (gradient) gradient->assign(m.theta.size(), 0.0);
  std::vector<double> predicted(inputs.size());
  const double inv_j = inputs.empty() ? 0.0 : 1.0 / static_cast<double>(inputs.size());
  std::vector<double> dh(m.hidden);
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    if (inputs[s].size() != m.input_dim) throw Error(ErrorCode::DimMismatch, "input dimension");
    const Forward f = forward(m, inputs[s]);
    predicted[s] = f.p[1];
    if (!gradient) continue;
    auto &g = *gradient;
    // d loss / d logit_c = (p_c - onehot_c) / J, with class 1 = fake.
    const double dl[2] = {(f.p[0] - (1.0 - labels[s])) * inv_j, (f.p[1] - labels[s]) * inv_j};
    const double *w2 = m.theta.data() + m.w2_offset();
    for (std::size_t c = 0; c < 2; ++c) {
      g[m.b2_offset() + c] += dl[c];
      for (std::size_t j = 0; j < m.hidden; ++j) g[m.w2_offset() + c * m.hidden + j] += dl[c] * f.h[j];
    }
    for (std::size_t j = 0; j < m.hidden; ++j) {
      const double back = dl[0] * w2[j] + dl[1] * w2[m.hidden + j];
      dh[j] = back * (1.0 - f.h[j] * f.h[j]);
    }
    for (std::size_t j = 0; j < m.hidden; ++j) {
      g[m.b1_offset() + j] += dh[j];
      double *row = g.data() + m.w1_offset() + j * m.input_dim;
      for (std::size_t i = 0; i < m.input_dim; ++i) row[i] += dh[j] * f.z[i];
    }
  }
  return cross_entropy(labels, predicted);
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

bool EarlyStopping::update(double val_loss) {
  ++epoch_;
  improved_ = epoch_ == 1 || val_loss < best_;
  if (improved_) {
    best_ = val_loss;
    best_epoch_ = epoch_;
    since_best_ = 0;
    return false;
  }
  return ++since_best_ >= patience_;
}

MlpTrainResult mlp_train(const std::vector<std::pair<std::vector<double>, Label>> &data, const TrainConfig &cfg,
                         FeatureKind kind) {
  if (!(cfg.val_fraction > 0.0 && cfg.val_fraction < 1.0))
    throw Error(ErrorCode::BadParams, "val_fraction must be in (0, 1)");
  if (cfg.patience < 1 || cfg.batch_size < 1) throw Error(ErrorCode::BadParams, "patience and batch_size must be >= 1");
  std::vector<int> classes;
  std::size_t n_fake = 0;
  for (const auto &[x, l] : data) {
    classes.push_back(l == Label::Fake ? 1 : 0);
    n_fake += l == Label::Fake;
  }
  if (n_fake < 2 || data.size() - n_fake < 2)
    throw Error(ErrorCode::ClassMissing, "need at least 2 samples per class");
  const std::size_t dim = data.front().first.size();
  for (const auto &[x, l] : data)
    if (x.size() != dim) throw Error(ErrorCode::DimMismatch, "inconsistent pooled dimension");

  auto [train_idx, val_idx] = stratified_split(classes, 1.0 - cfg.val_fraction, hash_combine(cfg.seed, 0x5117));

  MlpModel model(kind, dim, cfg.hidden);
  for (std::size_t i = 0; i < dim; ++i) {
    double mu = 0.0;
    for (auto s : train_idx) mu += data[s].first[i];
    mu /= static_cast<double>(train_idx.size());
    double var = 0.0;
    for (auto s : train_idx) var += (data[s].first[i] - mu) * (data[s].first[i] - mu);
    const double sd = std::sqrt(var / static_cast<double>(train_idx.size()));
    model.mean[i] = mu;
    model.scale[i] = sd > 1e-12 ? sd : 1.0;
  }
  Rng rng(hash_combine(cfg.seed, 0x1417));
  const double lim1 = std::sqrt(6.0 / static_cast<double>(dim + cfg.hidden));
  const double lim2 = std::sqrt(6.0 / static_cast<double>(cfg.hidden + 2));
  for (std::size_t i = 0; i < cfg.hidden * dim; ++i) model.theta[model.w1_offset() + i] = rng.uniform(-lim1, lim1);
  for (std::size_t i = 0; i < 2 * cfg.hidden; ++i) model.theta[model.w2_offset() + i] = rng.uniform(-lim2, lim2);

  auto gather = [&](const std::vector<std::size_t> &idx, std::size_t b, std::size_t e,
                    std::vector<std::vector<double>> &xs, std::vector<double> &ys) {
    xs.clear();
    ys.clear();
    for (std::size_t k = b; k < e; ++k) {
      xs.push_back(data[idx[k]].first);
      ys.push_back(data[idx[k]].second == Label::Fake ? 1.0 : 0.0);
    }
  };
  std::vector<std::vector<double>> val_x, batch_x;
  std::vector<double> val_y, batch_y, grad;
  gather(val_idx, 0, val_idx.size(), val_x, val_y);

  MlpTrainResult result;
  Adam adam(model.theta.size(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.epsilon);
  EarlyStopping stopper(cfg.patience);
  MlpModel best = model;
  std::vector<std::size_t> order = train_idx;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double train_loss = 0.0;
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const std::size_t e = std::min(order.size(), b + cfg.batch_size);
      gather(order, b, e, batch_x, batch_y);
      train_loss += mlp_loss_and_gradient(model, batch_x, batch_y, &grad) * static_cast<double>(e - b);
      adam.step(model.theta, grad);
    }
    train_loss /= static_cast<double>(order.size());
    const double val_loss = mlp_loss_and_gradient(model, val_x, val_y, nullptr);
    result.log.push_back({epoch, train_loss, val_loss});
    const bool stop = stopper.update(val_loss);
    if (stopper.improved()) best = model;
    if (stop) {
      result.stopped_early = true;
      break;
    }
  }
  result.best_epoch = stopper.best_epoch();
  result.model = std::move(best);
  return result;
}

double mlp_score(const MlpModel &model, std::span<const double> pooled) {
  if (pooled.size() != model.input_dim)
    throw Error(ErrorCode::DimMismatch,
                "expected " + std::to_string(model.input_dim) + " inputs, got " + std::to_string(pooled.size()));
  const auto p = model.predict(pooled);
  return p[0] - p[1];
}

MlpModel swap_classes(const MlpModel &model) {
  MlpModel out = model;
  for (std::size_t j = 0; j < model.hidden; ++j)
    std::swap(out.theta[out.w2_offset() + j], out.theta[out.w2_offset() + model.hidden + j]);
  std::swap(out.theta[out.b2_offset()], out.theta[out.b2_offset() + 1]);
  return out;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

constexpr char kModelMagic[4] = {'A', 'D', 'D', 'M'};
constexpr std::uint32_t kModelVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path &path) : path_(path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorCode::BadModel, "cannot write " + path.string());
    out_.write(kModelMagic, 4);
    u32(kModelVersion);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  void vec(const std::vector<double> &v) {
    for (double x : v) f64(x);
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path &path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, path.string());
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (bytes_.size() < 8 || std::memcmp(bytes_.data(), kModelMagic, 4) != 0)
      throw Error(ErrorCode::BadModel, path.string() + ": bad magic");
    pos_ = 4;
    if (u32() != kModelVersion) throw Error(ErrorCode::BadModel, path.string() + ": unsupported version");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(bytes_[pos_++])) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::vector<double> vec(std::size_t n) {
    std::vector<double> v(n);
    for (auto &x : v) x = f64();
    return v;
  }
  void finish() {
    if (pos_ != bytes_.size()) throw Error(ErrorCode::BadModel, path_.string() + ": trailing bytes");
  }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::BadModel, path_.string() + ": truncated");
  }
  std::filesystem::path path_;
  std::vector<char> bytes_;
  std::size_t pos_ = 0;
};

FeatureKind checked_kind(std::uint32_t v) {
  if (v < 1 || v > 3) throw Error(ErrorCode::BadModel, "bad feature kind");
  return static_cast<FeatureKind>(v);
}

void write_gmm(Writer &w, const DiagGmm &g) {
  w.u32(static_cast<std::uint32_t>(g.components));
  w.u32(static_cast<std::uint32_t>(g.dim));
  w.vec(g.weights);
  w.vec(g.means);
  w.vec(g.variances);
}

DiagGmm read_gmm(Reader &r) {
  DiagGmm g;
  g.components = r.u32();
  g.dim = r.u32();
  g.weights = r.vec(g.components);
  g.means = r.vec(g.components * g.dim);
  g.variances = r.vec(g.components * g.dim);
  return g;
}

}  // namespace

void write_model(const std::filesystem::path &path, const GmmModel &model) {
  Writer w(path);
  w.u32(static_cast<std::uint32_t>(ModelKind::Gmm));
  w.u32(static_cast<std::uint32_t>(model.kind));
  write_gmm(w, model.bonafide);
  write_gmm(w, model.fake);
}

void write_model(const std::filesystem::path &path, const MlpModel &model) {
  Writer w(path);
  w.u32(static_cast<std::uint32_t>(ModelKind::Mlp));
  w.u32(static_cast<std::uint32_t>(model.kind));
  w.u32(static_cast<std::uint32_t>(model.input_dim));
  w.u32(static_cast<std::uint32_t>(model.hidden));
  w.vec(model.theta);
  w.vec(model.mean);
  w.vec(model.scale);
}

ModelKind peek_model_kind(const std::filesystem::path &path) {
  Reader r(path);
  const auto k = r.u32();
  if (k != 1 && k != 2) throw Error(ErrorCode::BadModel, path.string() + ": unknown model kind");
  return static_cast<ModelKind>(k);
}

GmmModel read_gmm_model(const std::filesystem::path &path) {
  Reader r(path);
  if (r.u32() != static_cast<std::uint32_t>(ModelKind::Gmm)) throw Error(ErrorCode::BadModel, "not a GMM model");
  GmmModel m;
  m.kind = checked_kind(r.u32());
  m.bonafide = read_gmm(r);
  m.fake = read_gmm(r);
  r.finish();
  return m;
}

MlpModel read_mlp_model(const std::filesystem::path &path) {
  Reader r(path);
  if (r.u32() != static_cast<std::uint32_t>(ModelKind::Mlp)) throw Error(ErrorCode::BadModel, "not an MLP model");
  const auto kind = checked_kind(r.u32());
  const std::size_t in = r.u32();
  const std::size_t hidden = r.u32();
  MlpModel m(kind, in, hidden);
  m.theta = r.vec(m.theta.size());
  m.mean = r.vec(in);
  m.scale = r.vec(in);
  r.finish();
  return m;
}

}  // namespace addbench
