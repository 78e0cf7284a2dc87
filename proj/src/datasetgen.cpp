// src/datasetgen.cpp

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

#include "addbench/datasetgen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "addbench/error.hpp"
#include "addbench/parallel.hpp"
#include "addbench/rng.hpp"
#include "addbench/split.hpp"

namespace addbench {

namespace {

std::uint64_t plr_basis_points(double plr) { return static_cast<std::uint64_t>(std::llround(plr * 10000.0)); }

// Expected file size of a rendered 16-bit mono utterance.
bool rendered_ok(const std::filesystem::path &p) {
  std::error_code ec;
  return std::filesystem::file_size(p, ec) == 44 + 2 * kUtteranceLength && !ec;
}

std::string sanitize(const std::string &id) {
  std::string out;
  for (char c : id)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '@' ? c : '_');
  return out;
}

void dump_mask(const std::filesystem::path &wav, const std::vector<bool> &mask) {
  std::ofstream out(std::filesystem::path(wav).replace_extension(".mask"), std::ios::trunc);
  out << mask_to_bits(mask) << '\n';
}

struct Rendition {
  CodecSpec codec;
  double plr;
  std::uint64_t seed;
  std::filesystem::path out;
};

// Codec once per (utterance, codec), then loss + concealment per PLR.
void render_utterance(const Utterance &utt, const std::vector<Rendition> &jobs, const RenderOptions &opts) {
  bool all_done = !opts.force;
  for (const auto &j : jobs) all_done = all_done && rendered_ok(j.out);
  if (all_done) return;
  const AudioBuffer clean = load_utterance_audio(utt.path);
  std::map<std::string, AudioBuffer> coded;
  for (const auto &j : jobs) {
    if (!opts.force && rendered_ok(j.out)) continue;
    auto it = coded.find(j.codec.name);
    if (it == coded.end()) {
      const ExternalCodecTemplate *tmpl = nullptr;
      if (auto t = opts.external.find(j.codec.name); t != opts.external.end()) tmpl = &t->second;
      it = coded.emplace(j.codec.name, apply_codec(clean, j.codec, tmpl, utt.id)).first;
    }
    const ChannelCondition cond = item_condition(j.codec, j.plr, j.seed, opts);
    PacketStream stream = apply_loss(packetize(it->second, cond.frame_ms), cond.loss);
    write_wave(j.out, conceal(stream, cond.concealment));
    if (opts.dump_masks) dump_mask(j.out, *stream.loss_mask);
  }
}

void write_item_manifest(const std::filesystem::path &path, const std::vector<Utterance> &rows) {
  write_manifest(path, Manifest(rows));
}

nlohmann::ordered_json codec_json(const CodecSpec &c) {
  return {{"name", c.name},
          {"index", c.index},
          {"bandwidth_hz", c.bandwidth_hz},
          {"bitrate_kbps", c.bitrate_kbps},
          {"frame_ms", c.frame_ms},
          {"backend", c.backend == CodecBackend::Builtin ? "builtin" : "external"},
          {"min_kbps", c.min_kbps},
          {"max_kbps", c.max_kbps}};
}

CodecSpec codec_from_json(const nlohmann::json &j) {
  CodecSpec c;
  c.name = j.at("name").get<std::string>();
  c.index = j.at("index").get<int>();
  c.bandwidth_hz = j.at("bandwidth_hz").get<double>();
  c.bitrate_kbps = j.at("bitrate_kbps").get<double>();
  c.frame_ms = j.at("frame_ms").get<double>();
  c.backend = j.at("backend").get<std::string>() == "external" ? CodecBackend::External : CodecBackend::Builtin;
  c.min_kbps = j.at("min_kbps").get<double>();
  c.max_kbps = j.at("max_kbps").get<double>();
  return c;
}

nlohmann::ordered_json utterance_json(const Utterance &u) {
  return {{"id", u.id},
          {"label", std::string(to_string(u.label))},
          {"source_dataset", u.source_dataset},
          {"algorithm", u.algorithm},
          {"path", u.path.generic_string()}};
}

Utterance utterance_from_json(const nlohmann::json &j) {
  Utterance u;
  u.id = j.at("id").get<std::string>();
  u.label = parse_label(j.at("label").get<std::string>()).value_or(Label::Bonafide);
  u.source_dataset = j.at("source_dataset").get<std::string>();
  u.algorithm = j.at("algorithm").get<std::string>();
  u.path = j.at("path").get<std::string>();
  return u;
}

std::string seed_hex(std::uint64_t s) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(s));
  return buf;
}

std::uint64_t seed_from_hex(const std::string &s) { return std::stoull(s, nullptr, 16); }

}  // namespace

const std::vector<ConditionItem> &ConditionSet::items(int n) const {
  if (n == 0) return c0;
  auto it = conditions.find(n);
  if (it == conditions.end()) throw Error(ErrorCode::BadParams, "no condition " + std::to_string(n));
  return it->second;
}

std::vector<ConditionItem> &ConditionSet::items(int n) {
  return const_cast<std::vector<ConditionItem> &>(std::as_const(*this).items(n));
}

std::string codec_dir_name(const std::string &name) {
  std::string out;
  for (char c : name) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

ConditionSet build_addc(const Manifest &manifest, std::size_t per_dataset, std::uint64_t seed,
                        const std::vector<CodecSpec> &codecs) {
  ConditionSet set;
  set.seed = seed;
  set.codecs = codecs;
  for (int n = 1; n <= 5; ++n) set.plr_table[n] = plr_for_condition(n);

  std::vector<std::size_t> chosen;
  for (const auto &source : manifest.sources()) {
    for (Label label : {Label::Bonafide, Label::Fake}) {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < manifest.size(); ++i) {
        const auto &u = manifest.entries()[i];
        if (u.source_dataset == source && u.label == label) pool.push_back(i);
      }
      if (pool.size() < per_dataset)
        throw Error(ErrorCode::InsufficientData, source + "/" + std::string(to_string(label)) + ": have " +
                                                     std::to_string(pool.size()) + ", need " +
                                                     std::to_string(per_dataset));
      Rng rng(stable_hash(source + "/" + std::string(to_string(label)), seed));
      rng.shuffle(pool);
      chosen.insert(chosen.end(), pool.begin(), pool.begin() + static_cast<long>(per_dataset));
    }
  }
  std::sort(chosen.begin(), chosen.end());

  for (std::size_t i : chosen) {
    const auto &u = manifest.entries()[i];
    set.consumed.insert(u.id);
    ConditionItem item;
    item.item_id = u.id;
    item.utterance = u;
    set.c0.push_back(std::move(item));
  }
  for (int n = 1; n <= 5; ++n) {
    auto &items = set.conditions[n];
    items.reserve(set.c0.size() * codecs.size());
    for (const auto &clean : set.c0) {
      for (const auto &codec : codecs) {
        ConditionItem item;
        item.item_id = clean.utterance.id + "@" + codec_dir_name(codec.name);
        item.utterance = clean.utterance;
        item.condition = n;
        item.codec_index = codec.index;
        item.codec_name = codec.name;
        item.plr = set.plr_table[n];
        item.seed = derive_subseed(seed, clean.utterance.id, codec.index, item.plr);
        items.push_back(std::move(item));
      }
    }
  }
  return set;
}

Manifest remove_consumed(const Manifest &manifest, const std::set<std::string> &consumed) {
  std::vector<Utterance> kept;
  for (const auto &u : manifest.entries())
    if (!consumed.contains(u.id)) kept.push_back(u);
  return Manifest(std::move(kept));
}

AugmentPlan build_augmented(const Manifest &pool, std::uint64_t seed, const std::vector<CodecSpec> &codecs) {
  if (pool.empty()) throw Error(ErrorCode::EmptyCorpus, "training pool is empty");
  if (codecs.empty()) throw Error(ErrorCode::BadSpec, "no codecs");
  const std::size_t n_subsets = codecs.size();
  AugmentPlan plan;
  plan.seed = seed;
  plan.codecs = codecs;
  plan.plrs.assign(std::begin(kConditionPlr), std::end(kConditionPlr));
  plan.input_size = pool.size();
  plan.subsets.assign(n_subsets, {});

  std::map<std::pair<Label, std::string>, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto &u = pool.entries()[i];
    strata[{u.label, u.algorithm}].push_back(i);
  }
  std::vector<int> subset_of(pool.size(), 0);
  std::size_t cursor = 0;  // carried across strata so subset totals stay balanced
  for (auto &[key, idx] : strata) {
    Rng rng(stable_hash(std::string(to_string(key.first)) + "/" + key.second, seed));
    rng.shuffle(idx);
    for (std::size_t i : idx) subset_of[i] = static_cast<int>(cursor++ % n_subsets);
  }

  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto &u = pool.entries()[i];
    const int k = subset_of[i];
    plan.subsets[static_cast<std::size_t>(k)].push_back(u.id);
    const auto &codec = codecs[static_cast<std::size_t>(k)];
    for (double plr : plan.plrs) {
      AugmentItem item;
      item.item_id = u.id + "@" + codec_dir_name(codec.name) + "@p" + std::to_string(plr_basis_points(plr));
      item.utterance = u;
      item.subset = k;
      item.codec_index = codec.index;
      item.codec_name = codec.name;
      item.plr = plr;
      item.seed = derive_subseed(seed, u.id, codec.index, plr);
      plan.items.push_back(std::move(item));
    }
  }
  return plan;
}

std::pair<Manifest, Manifest> split_train_val(const Manifest &dataset, double fraction, std::uint64_t seed) {
  std::vector<int> classes;
  std::size_t fakes = 0;
  for (const auto &u : dataset.entries()) {
    classes.push_back(u.label == Label::Fake ? 1 : 0);
    fakes += u.label == Label::Fake;
  }
  if (fakes < 2 || dataset.size() - fakes < 2) throw Error(ErrorCode::TooSmall, "need at least 2 items per class");
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorCode::BadParams, "fraction must be in (0, 1)");
  auto [train_idx, val_idx] = stratified_split(classes, fraction, seed);
  std::vector<Utterance> train, val;
  for (auto i : train_idx) train.push_back(dataset.entries()[i]);
  for (auto i : val_idx) val.push_back(dataset.entries()[i]);
  return {Manifest(std::move(train)), Manifest(std::move(val))};
}

ChannelCondition item_condition(const CodecSpec &codec, double plr, std::uint64_t seed, const RenderOptions &opts) {
  ChannelCondition cond;
  cond.codec = codec;
  cond.loss.kind = opts.loss_kind;
  cond.loss.plr = plr;
  cond.loss.ge = opts.ge;
  cond.loss.seed = seed;
  cond.concealment = opts.concealment;
  cond.frame_ms = opts.frame_ms;
  for (int n = 1; n <= 5; ++n)
    if (plr_basis_points(plr) == plr_basis_points(kConditionPlr[n - 1])) cond.condition_index = n;
  return cond;
}

void render_condition_set(ConditionSet &set, const std::filesystem::path &root, const RenderOptions &opts) {
  std::map<std::string, std::size_t> c0_index;
  for (std::size_t i = 0; i < set.c0.size(); ++i) {
    auto &item = set.c0[i];
    item.audio = root / "C0" / "clean" / (sanitize(item.item_id) + ".wav");
    c0_index[item.utterance.id] = i;
  }
  std::vector<std::vector<std::pair<int, std::size_t>>> per_utt(set.c0.size());
  for (auto &[n, items] : set.conditions) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      auto &item = items[i];
      item.audio = root / condition_tag(n) / codec_dir_name(item.codec_name) / (sanitize(item.utterance.id) + ".wav");
      per_utt[c0_index.at(item.utterance.id)].emplace_back(n, i);
    }
  }
  std::map<std::string, CodecSpec> codec_by_name;
  for (const auto &c : set.codecs) codec_by_name[c.name] = c;

  parallel_for(set.c0.size(), opts.workers, [&](std::size_t u) {
    const auto &clean = set.c0[u];
    if (opts.force || !rendered_ok(clean.audio)) write_wave(clean.audio, load_utterance_audio(clean.utterance.path));
    std::vector<Rendition> jobs;
    for (auto [n, i] : per_utt[u]) {
      const auto &item = set.conditions.at(n)[i];
      jobs.push_back({codec_by_name.at(item.codec_name), item.plr, item.seed, item.audio});
    }
    render_utterance(clean.utterance, jobs, opts);
  });

  for (int n = 0; n < kConditionCount; ++n) {
    std::vector<Utterance> rows;
    for (const auto &item : set.items(n)) {
      Utterance u = item.utterance;
      u.id = item.item_id;
      u.path = item.audio;
      rows.push_back(std::move(u));
    }
    write_item_manifest(root / condition_tag(n) / "manifest.csv", rows);
  }
}

void render_augmented(AugmentPlan &plan, const std::filesystem::path &root, const RenderOptions &opts) {
  std::map<std::string, std::vector<std::size_t>> by_utt;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < plan.items.size(); ++i) {
    auto &item = plan.items[i];
    item.audio = root / codec_dir_name(item.codec_name) / ("p" + std::to_string(plr_basis_points(item.plr))) /
                 (sanitize(item.utterance.id) + ".wav");
    auto [it, fresh] = by_utt.try_emplace(item.utterance.id);
    if (fresh) order.push_back(item.utterance.id);
    it->second.push_back(i);
  }
  std::map<std::string, CodecSpec> codec_by_name;
  for (const auto &c : plan.codecs) codec_by_name[c.name] = c;

  parallel_for(order.size(), opts.workers, [&](std::size_t u) {
    const auto &idx = by_utt.at(order[u]);
    std::vector<Rendition> jobs;
    for (auto i : idx) {
      const auto &item = plan.items[i];
      jobs.push_back({codec_by_name.at(item.codec_name), item.plr, item.seed, item.audio});
    }
    render_utterance(plan.items[idx.front()].utterance, jobs, opts);
  });

  std::vector<Utterance> rows;
  for (const auto &item : plan.items) {
    Utterance u = item.utterance;
    u.id = item.item_id;
    u.path = item.audio;
    rows.push_back(std::move(u));
  }
  write_item_manifest(root / "manifest.csv", rows);
}

std::string condition_set_json(const ConditionSet &set, const std::map<std::string, std::string> &metadata) {
  nlohmann::ordered_json j;
  j["kind"] = "addc";
  j["seed"] = seed_hex(set.seed);
  j["codecs"] = nlohmann::ordered_json::array();
  for (const auto &c : set.codecs) j["codecs"].push_back(codec_json(c));
  nlohmann::ordered_json plr;
  for (const auto &[n, p] : set.plr_table) plr[condition_tag(n)] = p;
  j["plr_table"] = plr;
  j["counts"] = nlohmann::ordered_json::object();
  for (int n = 0; n < kConditionCount; ++n) j["counts"][condition_tag(n)] = set.items(n).size();
  j["consumed"] = std::vector<std::string>(set.consumed.begin(), set.consumed.end());
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (int n = 0; n < kConditionCount; ++n) {
    for (const auto &it : set.items(n)) {
      items.push_back({{"item_id", it.item_id},
                       {"condition", n},
                       {"utterance", utterance_json(it.utterance)},
                       {"codec_index", it.codec_index},
                       {"codec", it.codec_name},
                       {"plr", it.plr},
                       {"seed", seed_hex(it.seed)},
                       {"audio", it.audio.generic_string()}});
    }
  }
  j["items"] = items;
  nlohmann::ordered_json meta;
  for (const auto &[k, v] : metadata) meta[k] = v;
  j["metadata"] = meta;
  return j.dump(1) + "\n";
}

ConditionSet load_condition_set(const std::filesystem::path &plan_json) {
  std::ifstream in(plan_json);
  if (!in) throw Error(ErrorCode::StageInputMissing, plan_json.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const std::exception &e) {
    throw Error(ErrorCode::BadConfig, plan_json.string() + ": " + e.what());
  }
  ConditionSet set;
  set.seed = seed_from_hex(j.at("seed").get<std::string>());
  for (const auto &c : j.at("codecs")) set.codecs.push_back(codec_from_json(c));
  for (int n = 1; n <= 5; ++n) set.plr_table[n] = j.at("plr_table").at(condition_tag(n)).get<double>();
  for (const auto &id : j.at("consumed")) set.consumed.insert(id.get<std::string>());
  for (const auto &ji : j.at("items")) {
    ConditionItem it;
    it.item_id = ji.at("item_id").get<std::string>();
    it.condition = ji.at("condition").get<int>();
    it.utterance = utterance_from_json(ji.at("utterance"));
    it.codec_index = ji.at("codec_index").get<int>();
    it.codec_name = ji.at("codec").get<std::string>();
    it.plr = ji.at("plr").get<double>();
    it.seed = seed_from_hex(ji.at("seed").get<std::string>());
    it.audio = ji.at("audio").get<std::string>();
    if (it.condition == 0) set.c0.push_back(std::move(it));
    else set.conditions[it.condition].push_back(std::move(it));
  }
  for (int n = 1; n <= 5; ++n) set.conditions[n];
  return set;
}

std::string augment_plan_json(const AugmentPlan &plan, const std::map<std::string, std::string> &metadata) {
  nlohmann::ordered_json j;
  j["kind"] = "augmented";
  j["seed"] = seed_hex(plan.seed);
  j["input_size"] = plan.input_size;
  j["predicted_size"] = plan.predicted_size();
  j["actual_size"] = plan.items.size();
  j["plrs"] = plan.plrs;
  j["codecs"] = nlohmann::ordered_json::array();
  for (const auto &c : plan.codecs) j["codecs"].push_back(codec_json(c));
  j["subsets"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < plan.subsets.size(); ++k)
    j["subsets"].push_back({{"codec", plan.codecs[k].name}, {"size", plan.subsets[k].size()}, {"ids", plan.subsets[k]}});
  nlohmann::ordered_json meta;
  for (const auto &[k, v] : metadata) meta[k] = v;
  j["metadata"] = meta;
  return j.dump(1) + "\n";
}

}  // namespace addbench
