// src/config.cpp

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

#include "addbench/config.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "addbench/error.hpp"
#include "addbench/rng.hpp"

namespace addbench {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw Error(ErrorCode::BadConfig, key + ": not a number '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string &key, const std::string &v) {
  try {
    std::size_t used = 0;
    auto d = std::stoull(v, &used, 0);
    if (used != v.size() || (!v.empty() && v[0] == '-')) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception &) {
    throw Error(ErrorCode::BadConfig, key + ": not a non-negative integer '" + v + "'");
  }
}

bool to_bool(const std::string &key, const std::string &v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::BadConfig, key + ": not a boolean '" + v + "'");
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string &text, const std::string &origin) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line, section = "run";
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw Error(ErrorCode::BadConfig, origin + ":" + std::to_string(lineno) + ": bad section");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::BadConfig, origin + ":" + std::to_string(lineno) + ": expected key = value");
    cfg.values_[section + "." + trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot read config " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text, path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string &key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> KeyValueConfig::sections() const {
  std::set<std::string> s;
  for (const auto &[k, v] : values_) s.insert(k.substr(0, k.rfind('.')));
  return {s.begin(), s.end()};
}

std::string canonical_text(const KeyValueConfig &kv) {
  std::string out;
  for (const auto &[k, v] : kv.values()) out += k + "=" + v + "\n";
  return out;
}

std::string hex_digest(std::string_view bytes) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stable_hash(bytes)));
  return buf;
}

std::string file_digest(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex_digest(bytes);
}

std::string_view to_string(DetectorKind kind) { return kind == DetectorKind::Gmm ? "gmm" : "mlp"; }

RunConfig make_run_config(const KeyValueConfig &kv, const std::filesystem::path &base_dir) {
  static const std::set<std::string> known = {
      "paths.corpus_manifest", "paths.work_dir",     "run.seed",          "run.workers",
      "run.feature",           "addc.per_dataset",   "channel.loss_model", "channel.ge_p",
      "channel.ge_r",          "channel.concealment", "channel.frame_ms", "channel.dump_masks",
      "codec.concurrency",     "detector.model",     "detector.components", "detector.max_iterations",
      "detector.tolerance",    "detector.max_frames", "detector.batch_size", "detector.epochs",
      "detector.learning_rate", "detector.patience", "detector.val_fraction", "detector.hidden",
      "demo.per_class"};
  static const std::set<std::string> codec_keys = {"name",     "backend",    "bandwidth_hz", "bitrate_kbps",
                                                   "frame_ms", "encode_cmd", "decode_cmd",   "work_dir"};
  for (const auto &[k, v] : kv.values()) {
    if (k.rfind("codec.", 0) == 0 && k != "codec.concurrency") {
      const auto field = k.substr(k.rfind('.') + 1);
      if (!codec_keys.contains(field)) throw Error(ErrorCode::BadConfig, "unknown codec key " + k);
      continue;
    }
    if (!known.contains(k)) throw Error(ErrorCode::BadConfig, "unknown key " + k);
  }

  RunConfig c;
  c.base_dir = base_dir;
  auto path_of = [&](const std::string &key, const std::string &fallback) {
    std::filesystem::path p = kv.get(key).value_or(fallback);
    return (p.is_absolute() ? p : base_dir / p).lexically_normal();
  };
  c.corpus_manifest = path_of("paths.corpus_manifest", "corpus/manifest.csv");
  c.work_dir = path_of("paths.work_dir", "work");
  auto seed = kv.get("run.seed");
  if (!seed) throw Error(ErrorCode::BadConfig, "run.seed is required");
  c.seed = to_u64("run.seed", *seed);
  if (auto v = kv.get("run.workers")) c.workers = static_cast<unsigned>(to_u64("run.workers", *v));
  if (auto v = kv.get("run.feature")) {
    auto f = parse_feature_kind(*v);
    if (!f) throw Error(ErrorCode::BadConfig, "run.feature must be lfcc, cqcc or raw");
    c.feature = *f;
  }
  if (auto v = kv.get("addc.per_dataset")) c.per_dataset = to_u64("addc.per_dataset", *v);

  if (auto v = kv.get("channel.loss_model")) {
    auto k = parse_loss_kind(*v);
    if (!k) throw Error(ErrorCode::BadConfig, "channel.loss_model must be bernoulli or gilbert_elliott");
    c.loss_kind = *k;
  }
  if (kv.get("channel.ge_p") || kv.get("channel.ge_r")) {
    GilbertElliottParams ge;
    ge.p_good_to_bad = to_double("channel.ge_p", kv.get("channel.ge_p").value_or("0"));
    ge.p_bad_to_good = to_double("channel.ge_r", kv.get("channel.ge_r").value_or("0.5"));
    for (double p : {ge.p_good_to_bad, ge.p_bad_to_good})
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadConfig, "ge_p/ge_r must be in [0, 1]");
    c.ge = ge;
  }
  if (auto v = kv.get("channel.concealment")) {
    auto s = parse_concealment(*v);
    if (!s) throw Error(ErrorCode::BadConfig, "channel.concealment must be zero_fill, repeat_previous or linear_interp");
    c.concealment = *s;
  }
  if (auto v = kv.get("channel.frame_ms")) c.frame_ms = to_double("channel.frame_ms", *v);
  if (!(c.frame_ms > 0.0)) throw Error(ErrorCode::BadConfig, "channel.frame_ms must be > 0");
  if (auto v = kv.get("channel.dump_masks")) c.dump_masks = to_bool("channel.dump_masks", *v);
  if (auto v = kv.get("codec.concurrency"))
    c.codec_concurrency = static_cast<unsigned>(to_u64("codec.concurrency", *v));

  c.codecs = default_registry();
  for (auto &spec : c.codecs) {
    const std::string sec = "codec." + spec.name + ".";
    if (auto v = kv.get(sec + "bandwidth_hz")) spec.bandwidth_hz = to_double(sec + "bandwidth_hz", *v);
    if (auto v = kv.get(sec + "bitrate_kbps")) spec.bitrate_kbps = to_double(sec + "bitrate_kbps", *v);
    if (auto v = kv.get(sec + "frame_ms")) spec.frame_ms = to_double(sec + "frame_ms", *v);
    if (auto v = kv.get(sec + "backend")) {
      if (*v == "external") spec.backend = CodecBackend::External;
      else if (*v == "builtin") spec.backend = CodecBackend::Builtin;
      else throw Error(ErrorCode::BadConfig, sec + "backend must be builtin or external");
    }
    try {
      validate(spec);
    } catch (const Error &e) {
      throw Error(ErrorCode::BadConfig, e.what());
    }
    if (spec.backend == CodecBackend::External) {
      ExternalCodecTemplate t;
      t.encode_cmd = kv.get(sec + "encode_cmd").value_or("");
      t.decode_cmd = kv.get(sec + "decode_cmd").value_or("");
      t.work_dir = path_of(sec + "work_dir", "work/scratch");
      try {
        validate(t);
      } catch (const Error &e) {
        throw Error(ErrorCode::BadConfig, e.what());
      }
      c.external[spec.name] = t;
    }
  }
  for (const auto &section : kv.sections()) {
    if (section.rfind("codec.", 0) != 0) continue;
    const auto name = section.substr(6);
    bool found = false;
    for (const auto &spec : c.codecs) found = found || spec.name == name;
    if (!found) throw Error(ErrorCode::BadConfig, "unknown codec section [" + section + "]");
  }

  if (auto v = kv.get("detector.model")) {
    if (*v == "gmm") c.detector = DetectorKind::Gmm;
    else if (*v == "mlp") c.detector = DetectorKind::Mlp;
    else throw Error(ErrorCode::BadConfig, "detector.model must be gmm or mlp");
  }
  if (auto v = kv.get("detector.components")) c.gmm.components = to_u64("detector.components", *v);
  if (auto v = kv.get("detector.max_iterations")) c.gmm.max_iterations = to_u64("detector.max_iterations", *v);
  if (auto v = kv.get("detector.tolerance")) c.gmm.tolerance = to_double("detector.tolerance", *v);
  if (auto v = kv.get("detector.max_frames")) c.gmm_max_frames = to_u64("detector.max_frames", *v);
  if (auto v = kv.get("detector.batch_size")) c.train.batch_size = to_u64("detector.batch_size", *v);
  if (auto v = kv.get("detector.epochs")) c.train.epochs = to_u64("detector.epochs", *v);
  if (auto v = kv.get("detector.learning_rate")) c.train.learning_rate = to_double("detector.learning_rate", *v);
  if (auto v = kv.get("detector.patience")) c.train.patience = to_u64("detector.patience", *v);
  if (auto v = kv.get("detector.val_fraction")) c.train.val_fraction = to_double("detector.val_fraction", *v);
  if (auto v = kv.get("detector.hidden")) c.train.hidden = to_u64("detector.hidden", *v);
  if (c.gmm.components == 0) throw Error(ErrorCode::BadConfig, "detector.components must be >= 1");
  if (!(c.train.val_fraction > 0.0 && c.train.val_fraction < 1.0))
    throw Error(ErrorCode::BadConfig, "detector.val_fraction must be in (0, 1)");
  if (c.train.patience < 1) throw Error(ErrorCode::BadConfig, "detector.patience must be >= 1");
  c.gmm.seed = c.seed;
  c.train.seed = c.seed;

  if (auto v = kv.get("demo.per_class")) c.demo_per_class = to_u64("demo.per_class", *v);
  c.digest = hex_digest(canonical_text(kv));
  return c;
}

}  // namespace addbench
