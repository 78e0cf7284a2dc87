// src/pipeline.cpp

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

#include "addbench/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <json.hpp>

#include "addbench/datasetgen.hpp"
#include "addbench/detector.hpp"
#include "addbench/error.hpp"
#include "addbench/evaluation.hpp"
#include "addbench/log.hpp"
#include "addbench/parallel.hpp"
#include "addbench/synth.hpp"

namespace addbench {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string_view to_string(TrainSet set) { return set == TrainSet::Original ? "original" : "augmented"; }

std::optional<TrainSet> parse_train_set(std::string_view text) {
  if (text == "original" || text == "clean") return TrainSet::Original;
  if (text == "augmented") return TrainSet::Augmented;
  return std::nullopt;
}

fs::path Workspace::features(FeatureKind kind, const std::string &set) const {
  return root / "features" / std::string(to_string(kind)) / set;
}

std::string model_name(const RunConfig &cfg, TrainSet set) {
  return std::string(to_string(cfg.detector)) + "_" + std::string(to_string(cfg.feature)) + "_" +
         std::string(to_string(set));
}

namespace {

std::string read_text(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes only when the content differs; returns true if the file changed.
bool write_if_changed(const fs::path &p, const std::string &text) {
  if (fs::exists(p) && read_text(p) == text) return false;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + p.string());
  out << text;
  return true;
}

void require(const fs::path &p, const std::string &hint) {
  if (!fs::exists(p)) throw Error(ErrorCode::StageInputMissing, p.string() + " not found; run `" + hint + "` first");
}

RenderOptions render_options(const RunConfig &cfg, bool force) {
  RenderOptions o;
  o.concealment = cfg.concealment;
  o.loss_kind = cfg.loss_kind;
  o.ge = cfg.ge;
  o.frame_ms = cfg.frame_ms;
  o.workers = cfg.workers;
  o.dump_masks = cfg.dump_masks;
  o.external = cfg.external;
  o.force = force;
  set_external_codec_concurrency(cfg.codec_concurrency);
  return o;
}

std::string codec_text(const CodecSpec &c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%g kbps, %g Hz, %g ms, %s", c.bitrate_kbps, c.bandwidth_hz, c.frame_ms,
                c.backend == CodecBackend::Builtin ? "builtin" : "external");
  return buf;
}

// Everything that determines rendered audio, apart from the corpus itself.
std::string channel_text(const RunConfig &cfg) {
  std::ostringstream os;
  os << "seed=" << cfg.seed << ";loss=" << to_string(cfg.loss_kind) << ";conceal=" << to_string(cfg.concealment)
     << ";frame_ms=" << cfg.frame_ms;
  if (cfg.ge) os << ";ge=" << cfg.ge->p_good_to_bad << "," << cfg.ge->p_bad_to_good;
  for (const auto &c : cfg.codecs) os << ";" << c.name << "=" << codec_text(c);
  for (const auto &[name, t] : cfg.external) os << ";" << name << ":" << t.encode_cmd << "|" << t.decode_cmd;
  return os.str();
}

std::map<std::string, std::string> run_metadata(const RunConfig &cfg) {
  std::map<std::string, std::string> m;
  m["config_digest"] = cfg.digest;
  m["master_seed"] = std::to_string(cfg.seed);
  m["loss_model"] = std::string(to_string(cfg.loss_kind));
  m["concealment"] = std::string(to_string(cfg.concealment));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", cfg.frame_ms);
  m["frame_ms"] = buf;
  bool builtin = false;
  for (const auto &c : cfg.codecs) {
    m["codec." + c.name] = codec_text(c);
    builtin = builtin || c.backend == CodecBackend::Builtin;
  }
  m["feature"] = std::string(to_string(cfg.feature));
  m["detector"] = std::string(to_string(cfg.detector));
  if (builtin) m["assumption.codec"] = "builtin codecs are band-limit plus mu-law surrogates, not bit-exact codecs";
  if (cfg.loss_kind == LossKind::GilbertElliott && !cfg.ge)
    m["assumption.gilbert_elliott"] = "r = 0.5, p derived from the target PLR";
  m["assumption.truncation"] = "first 64000 samples kept, short clips zero-padded at the tail";
  m["assumption.channel"] = "loss drops whole packets after the codec round trip";
  m["assumption.metrics"] = "pooled over codecs within a condition; F1 at the EER threshold with fake as positive";
  switch (cfg.feature) {
    case FeatureKind::Lfcc:
      m["assumption.features"] = "LFCC: 40 linear filters, 1024/512 Hamming frames, 20 DCT coefficients with c0, deltas N=2";
      break;
    case FeatureKind::Cqcc:
      m["assumption.features"] = "CQCC: 12 bins/octave from 15.625 Hz, hop 128, 128-point uniform resampling, 20 DCT coefficients with c0, deltas N=2";
      break;
    case FeatureKind::Raw:
      m["assumption.features"] = "raw waveform scaled by 1/32768";
      break;
  }
  if (cfg.detector == DetectorKind::Mlp) {
    std::snprintf(buf, sizeof buf, "%g", cfg.train.learning_rate);
    m["assumption.training"] = std::string("Adam lr ") + buf + ", early stopping on validation loss, patience " +
                               std::to_string(cfg.train.patience);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Feature index

struct IndexRow {
  std::string id;
  std::string condition;  // empty outside the test set
  Label label = Label::Bonafide;
  std::string audio_digest;
  std::string feature_file;  // relative to the index directory
};

struct FeatureIndex {
  std::string manifest_digest;
  std::vector<IndexRow> rows;
};

std::string index_text(const FeatureIndex &idx) {
  std::string out = "# manifest_digest=" + idx.manifest_digest + "\nid,condition,label,audio_digest,feature_file\n";
  for (const auto &r : idx.rows)
    out += r.id + "," + r.condition + "," + std::string(to_string(r.label)) + "," + r.audio_digest + "," +
           r.feature_file + "\n";
  return out;
}

std::optional<FeatureIndex> load_index(const fs::path &dir) {
  const fs::path p = dir / "index.csv";
  if (!fs::exists(p)) return std::nullopt;
  std::istringstream in(read_text(p));
  FeatureIndex idx;
  std::string line;
  const std::string prefix = "# manifest_digest=";
  if (!std::getline(in, line) || line.rfind(prefix, 0) != 0)
    throw Error(ErrorCode::BadCache, p.string() + ": missing digest line");
  idx.manifest_digest = line.substr(prefix.size());
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw Error(ErrorCode::BadCache, p.string() + ": bad row '" + line + "'");
    auto label = parse_label(f[2]);
    if (!label) throw Error(ErrorCode::BadCache, p.string() + ": bad label '" + f[2] + "'");
    idx.rows.push_back({f[0], f[1], *label, f[3], f[4]});
  }
  return idx;
}

struct FeatureInput {
  std::string condition;
  Utterance utt;
};

// Manifests backing a feature set, in a fixed order.
std::vector<std::pair<std::string, fs::path>> set_manifests(const Workspace &ws, const std::string &set) {
  if (set == "original") return {{"", ws.training_pool()}};
  if (set == "augmented") return {{"", ws.augmented() / "manifest.csv"}};
  if (set == "addc") {
    std::vector<std::pair<std::string, fs::path>> out;
    for (int n = 0; n < kConditionCount; ++n)
      out.emplace_back(condition_tag(n), ws.addc() / condition_tag(n) / "manifest.csv");
    return out;
  }
  throw Error(ErrorCode::BadConfig, "unknown feature set '" + set + "' (original, augmented, addc)");
}

std::string stage_hint(const std::string &set) {
  return set == "augmented" ? "augment" : "build-addc";
}

std::string manifests_digest(const std::vector<std::pair<std::string, fs::path>> &manifests) {
  std::string all;
  for (const auto &[tag, p] : manifests) all += tag + ":" + file_digest(p) + ";";
  return hex_digest(all);
}

// Loads the index of a feature set and checks it still matches its manifests.
FeatureIndex checked_index(const RunConfig &cfg, const std::string &set) {
  Workspace ws{cfg.work_dir};
  const auto manifests = set_manifests(ws, set);
  for (const auto &[tag, p] : manifests) require(p, stage_hint(set));
  const fs::path dir = ws.features(cfg.feature, set);
  auto idx = load_index(dir);
  if (!idx) throw Error(ErrorCode::StageInputMissing, (dir / "index.csv").string() + " not found; run `features " + set + "` first");
  if (idx->manifest_digest != manifests_digest(manifests))
    throw Error(ErrorCode::StaleCache, "feature cache for '" + set + "' is older than its manifest; rerun `features " + set + "`");
  return *idx;
}

FeatureMatrix load_features(const RunConfig &cfg, const std::string &set, const IndexRow &row) {
  const fs::path p = Workspace{cfg.work_dir}.features(cfg.feature, set) / row.feature_file;
  FeatureMatrix f = read_feature_file(p);
  if (f.kind != cfg.feature) throw Error(ErrorCode::KindMismatch, p.string());
  return f;
}

std::string file_safe(const std::string &id) {
  std::string out;
  for (char c : id)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '@' ? c : '_');
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

StageResult stage_demo(const RunConfig &cfg, bool force) {
  StageResult r;
  if (!force && fs::exists(cfg.corpus_manifest)) {
    r.skipped = 1;
    r.summary = "demo corpus present: " + cfg.corpus_manifest.string();
    return r;
  }
  DemoCorpusOptions opts;
  opts.per_class = cfg.demo_per_class;
  opts.seed = cfg.seed;
  const fs::path dir = cfg.corpus_manifest.parent_path();
  Manifest m = generate_demo_corpus(dir, opts);
  if (cfg.corpus_manifest.filename() != "manifest.csv") write_manifest(cfg.corpus_manifest, m);
  r.written = m.size();
  r.summary = "demo corpus: " + std::to_string(m.size()) + " utterances in " + dir.string();
  return r;
}

StageResult stage_build_addc(const RunConfig &cfg, bool force) {
  Workspace ws{cfg.work_dir};
  require(cfg.corpus_manifest, "demo");
  const Manifest corpus = load_manifest(cfg.corpus_manifest);
  const std::string input = hex_digest(file_digest(cfg.corpus_manifest) + ";per=" + std::to_string(cfg.per_dataset) +
                                       ";" + channel_text(cfg));
  const fs::path plan_path = ws.addc() / "plan.json";
  bool fresh = false;
  if (fs::exists(plan_path)) {
    auto j = json::parse(read_text(plan_path), nullptr, false);
    fresh = !j.is_discarded() && j.contains("metadata") && j["metadata"].value("input_digest", "") == input;
  }
  if (!fresh && fs::exists(plan_path)) log_info("addc inputs changed; re-rendering");

  ConditionSet set = build_addc(corpus, cfg.per_dataset, cfg.seed, cfg.codecs);
  render_condition_set(set, ws.addc(), render_options(cfg, force || !fresh));
  auto meta = run_metadata(cfg);
  meta["input_digest"] = input;
  write_if_changed(plan_path, condition_set_json(set, meta));
  const Manifest pool = remove_consumed(corpus, set.consumed);
  write_manifest(ws.training_pool(), pool);

  StageResult r;
  r.written = set.c0.size();
  for (const auto &[n, items] : set.conditions) r.written += items.size();
  r.summary = "addc: C0=" + std::to_string(set.c0.size());
  for (const auto &[n, items] : set.conditions) r.summary += " " + condition_tag(n) + "=" + std::to_string(items.size());
  r.summary += "; training pool " + std::to_string(pool.size());
  return r;
}

StageResult stage_augment(const RunConfig &cfg, bool force) {
  Workspace ws{cfg.work_dir};
  require(ws.training_pool(), "build-addc");
  const Manifest pool = load_manifest(ws.training_pool());
  const std::string input = hex_digest(file_digest(ws.training_pool()) + ";" + channel_text(cfg));
  const fs::path plan_path = ws.augmented() / "plan.json";
  bool fresh = false;
  if (fs::exists(plan_path)) {
    auto j = json::parse(read_text(plan_path), nullptr, false);
    fresh = !j.is_discarded() && j.contains("metadata") && j["metadata"].value("input_digest", "") == input;
  }
  AugmentPlan plan = build_augmented(pool, cfg.seed, cfg.codecs);
  render_augmented(plan, ws.augmented(), render_options(cfg, force || !fresh));
  auto meta = run_metadata(cfg);
  meta["input_digest"] = input;
  write_if_changed(plan_path, augment_plan_json(plan, meta));

  StageResult r;
  r.written = plan.items.size();
  r.summary = "augmented: " + std::to_string(plan.items.size()) + " items from " + std::to_string(pool.size()) +
              " (predicted " + std::to_string(plan.predicted_size()) + ")";
  return r;
}

StageResult stage_features(const RunConfig &cfg, const std::string &set, bool force) {
  Workspace ws{cfg.work_dir};
  const auto manifests = set_manifests(ws, set);
  for (const auto &[tag, p] : manifests) require(p, stage_hint(set));

  std::vector<FeatureInput> inputs;
  for (const auto &[tag, p] : manifests) {
    const Manifest m = load_manifest(p);
    for (const auto &u : m.entries()) inputs.push_back({tag, u});
  }

  const fs::path dir = ws.features(cfg.feature, set);
  std::map<std::pair<std::string, std::string>, std::string> previous;
  if (!force) {
    try {
      if (auto old = load_index(dir))
        for (const auto &row : old->rows) previous[{row.condition, row.id}] = row.audio_digest;
    } catch (const Error &e) {
      log_warning(std::string("ignoring unreadable feature index: ") + e.what());
    }
  }

  FeatureIndex idx;
  idx.manifest_digest = manifests_digest(manifests);
  idx.rows.resize(inputs.size());
  std::vector<char> computed(inputs.size(), 0);
  parallel_for(inputs.size(), cfg.workers, [&](std::size_t i) {
    const auto &in = inputs[i];
    IndexRow &row = idx.rows[i];
    row.id = in.utt.id;
    row.condition = in.condition;
    row.label = in.utt.label;
    row.audio_digest = file_digest(in.utt.path);
    row.feature_file = (in.condition.empty() ? "" : in.condition + "/") + file_safe(in.utt.id) + ".feat";
    const fs::path out = dir / row.feature_file;
    auto it = previous.find({row.condition, row.id});
    if (it != previous.end() && it->second == row.audio_digest && feature_file_valid(out, cfg.feature)) return;
    const AudioBuffer audio = load_utterance_audio(in.utt.path);
    fs::create_directories(out.parent_path());
    write_feature_file(out, extract_features(cfg.feature, audio));
    computed[i] = 1;
  });
  write_if_changed(dir / "index.csv", index_text(idx));

  StageResult r;
  r.written = static_cast<std::size_t>(std::count(computed.begin(), computed.end(), 1));
  r.skipped = inputs.size() - r.written;
  r.summary = "features " + std::string(to_string(cfg.feature)) + "/" + set + ": " + std::to_string(r.written) +
              " computed, " + std::to_string(r.skipped) + " cache hits";
  return r;
}

StageResult stage_train(const RunConfig &cfg, TrainSet set, bool force) {
  Workspace ws{cfg.work_dir};
  const std::string set_name(to_string(set));
  const FeatureIndex idx = checked_index(cfg, set_name);
  const std::string name = model_name(cfg, set);
  const fs::path model_path = ws.models() / (name + ".model");
  const fs::path log_path = ws.models() / (name + ".json");
  const std::string input = hex_digest(index_text(idx) + ";" + cfg.digest);

  StageResult r;
  if (!force && fs::exists(model_path) && fs::exists(log_path)) {
    auto j = json::parse(read_text(log_path), nullptr, false);
    if (!j.is_discarded() && j.value("input_digest", "") == input) {
      r.skipped = 1;
      r.summary = "model up to date: " + model_path.string();
      return r;
    }
  }

  std::vector<std::pair<FeatureMatrix, Label>> data(idx.rows.size());
  parallel_for(idx.rows.size(), cfg.workers, [&](std::size_t i) {
    data[i] = {load_features(cfg, set_name, idx.rows[i]), idx.rows[i].label};
  });

  json log;
  log["model"] = name;
  log["input_digest"] = input;
  log["train_set"] = set_name;
  log["items"] = data.size();
  fs::create_directories(ws.models());
  if (cfg.detector == DetectorKind::Gmm) {
    // Same 80/20 protocol as the classifier; the GMM only sees the 80% part.
    std::vector<Utterance> utts;
    for (const auto &row : idx.rows) utts.push_back({row.condition + "|" + row.id, row.label, "", "", {}});
    auto [train, held] = split_train_val(Manifest(std::move(utts)), 1.0 - cfg.train.val_fraction, cfg.seed);
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < idx.rows.size(); ++i) pos[idx.rows[i].condition + "|" + idx.rows[i].id] = i;
    std::vector<std::pair<FeatureMatrix, Label>> fit;
    for (const auto &u : train.entries()) fit.push_back(std::move(data[pos.at(u.id)]));
    GmmFitOptions opts = cfg.gmm;
    GmmModel model = gmm_train(fit, opts, cfg.gmm_max_frames);
    write_model(model_path, model);
    log["train_items"] = fit.size();
    log["held_out_items"] = held.size();
    log["components"] = opts.components;
  } else {
    std::vector<std::pair<std::vector<double>, Label>> pooled(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) pooled[i] = {pool_stats(data[i].first), data[i].second};
    MlpTrainResult res = mlp_train(pooled, cfg.train, cfg.feature);
    write_model(model_path, res.model);
    log["learning_rate"] = cfg.train.learning_rate;
    log["patience"] = cfg.train.patience;
    log["val_fraction"] = cfg.train.val_fraction;
    log["best_epoch"] = res.best_epoch;
    log["stopped_early"] = res.stopped_early;
    json epochs = json::array();
    for (const auto &e : res.log)
      epochs.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
    log["epochs"] = epochs;
  }
  write_if_changed(log_path, log.dump(2) + "\n");
  r.written = 1;
  r.summary = "trained " + name + " on " + std::to_string(data.size()) + " items";
  return r;
}

StageResult stage_eval(const RunConfig &cfg, TrainSet set, bool force, const std::optional<fs::path> &scores_csv) {
  Workspace ws{cfg.work_dir};
  require(ws.addc() / "plan.json", "build-addc");
  const ConditionSet conditions = load_condition_set(ws.addc() / "plan.json");
  auto meta = run_metadata(cfg);
  ScoreSet scores;
  std::string name;
  if (scores_csv) {
    require(*scores_csv, "a scorer");
    scores = read_score_file(*scores_csv);
    name = "external_" + file_safe(scores_csv->stem().string());
    meta["scores"] = "external";
  } else {
    name = model_name(cfg, set);
    const fs::path model_path = ws.models() / (name + ".model");
    require(model_path, "train " + std::string(to_string(set)));
    const FeatureIndex idx = checked_index(cfg, "addc");
    const ModelKind kind = peek_model_kind(model_path);
    meta["model_digest"] = file_digest(model_path);
    meta["train_set"] = std::string(to_string(set));
    scores.resize(idx.rows.size());
    if (kind == ModelKind::Gmm) {
      const GmmModel model = read_gmm_model(model_path);
      parallel_for(idx.rows.size(), cfg.workers, [&](std::size_t i) {
        const auto &row = idx.rows[i];
        scores[i] = {row.id, row.condition, gmm_score(model, load_features(cfg, "addc", row)), row.label};
      });
    } else {
      const MlpModel model = read_mlp_model(model_path);
      parallel_for(idx.rows.size(), cfg.workers, [&](std::size_t i) {
        const auto &row = idx.rows[i];
        scores[i] = {row.id, row.condition, mlp_score(model, pool_stats(load_features(cfg, "addc", row))), row.label};
      });
    }
  }
  (void)force;  // scoring is cheap; outputs are rewritten only when they change
  const EvalReport report = evaluate_conditions(scores, conditions, meta);
  const fs::path dir = ws.eval() / name;
  fs::create_directories(dir);
  if (!scores_csv) write_score_file(dir / "scores.csv", scores);
  std::size_t written = 0;
  written += write_if_changed(dir / "report.json", report_json(report));
  written += write_if_changed(dir / "report.txt", report_text(report));
  written += write_if_changed(dir / "report.csv", report_csv(report));

  StageResult r;
  r.written = written;
  r.summary = "eval " + name + ":\n" + report_text(report);
  return r;
}

StageResult stage_report(const RunConfig &cfg) {
  Workspace ws{cfg.work_dir};
  if (!fs::exists(ws.eval())) throw Error(ErrorCode::StageInputMissing, ws.eval().string() + " not found; run `eval` first");
  std::vector<fs::path> reports;
  for (const auto &e : fs::directory_iterator(ws.eval()))
    if (fs::exists(e.path() / "report.json")) reports.push_back(e.path() / "report.json");
  if (reports.empty()) throw Error(ErrorCode::StageInputMissing, "no evaluation reports under " + ws.eval().string());
  std::sort(reports.begin(), reports.end());

  json summary;
  summary["config_digest"] = cfg.digest;
  json models = json::object();
  std::map<std::string, std::vector<double>> eers;
  std::ostringstream txt;
  txt << "EER (%) per condition\n";
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-28s", "model");
  txt << buf;
  for (int n = 0; n < kConditionCount; ++n) {
    std::snprintf(buf, sizeof buf, "%8s", condition_tag(n).c_str());
    txt << buf;
  }
  txt << "  mean(C1-C5)  spread\n";
  for (const auto &p : reports) {
    const std::string name = p.parent_path().filename().string();
    const json j = json::parse(read_text(p));
    std::vector<double> e;
    for (const auto &c : j["conditions"]) e.push_back(c["eer"].get<double>());
    double mean15 = 0.0;
    for (std::size_t n = 1; n < e.size(); ++n) mean15 += e[n] / static_cast<double>(e.size() - 1);
    const double spread = *std::max_element(e.begin(), e.end()) - *std::min_element(e.begin(), e.end());
    eers[name] = e;
    json m;
    m["conditions"] = j["conditions"];
    m["mean_eer_c1_c5"] = mean15;
    m["eer_spread"] = spread;
    m["c0_to_c1_degradation"] = j["c0_to_c1_degradation"];
    m["per_codec"] = j["per_codec"];
    models[name] = m;
    std::snprintf(buf, sizeof buf, "%-28s", name.c_str());
    txt << buf;
    for (double v : e) {
      std::snprintf(buf, sizeof buf, "%8.2f", 100.0 * v);
      txt << buf;
    }
    std::snprintf(buf, sizeof buf, "  %11.2f  %6.2f\n", 100.0 * mean15, 100.0 * spread);
    txt << buf;
  }
  summary["models"] = models;

  json comparisons = json::array();
  for (const auto &[name, e] : eers) {
    const std::string suffix = "_original";
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
    const std::string aug = name.substr(0, name.size() - suffix.size()) + "_augmented";
    if (!eers.contains(aug)) continue;
    const auto &a = eers.at(aug);
    const double s0 = models[name]["eer_spread"].get<double>(), s1 = models[aug]["eer_spread"].get<double>();
    const double m0 = models[name]["mean_eer_c1_c5"].get<double>(), m1 = models[aug]["mean_eer_c1_c5"].get<double>();
    json c;
    c["clean_trained"] = name;
    c["augmented_trained"] = aug;
    c["spread_reduction"] = s0 > 0.0 ? 1.0 - s1 / s0 : 0.0;
    c["mean_eer_c1_c5_change"] = m1 - m0;
    comparisons.push_back(c);
    std::snprintf(buf, sizeof buf, "\n%s -> %s: spread %.2f -> %.2f pp, mean(C1-C5) %.2f -> %.2f pp\n",
                  name.c_str(), aug.c_str(), 100.0 * s0, 100.0 * s1, 100.0 * m0, 100.0 * m1);
    txt << buf;
    (void)a;
  }
  summary["comparisons"] = comparisons;

  for (const auto &[name, m] : models.items()) {
    if (m["per_codec"].empty()) continue;
    txt << "\nper-codec EER (%) for " << name << "\n";
    std::snprintf(buf, sizeof buf, "  %-10s", "codec");
    txt << buf;
    for (int n = 1; n < kConditionCount; ++n) {
      std::snprintf(buf, sizeof buf, "%8s", condition_tag(n).c_str());
      txt << buf;
    }
    txt << '\n';
    for (const auto &[codec, rows] : m["per_codec"].items()) {
      std::snprintf(buf, sizeof buf, "  %-10s", codec.c_str());
      txt << buf;
      for (const auto &row : rows) {
        std::snprintf(buf, sizeof buf, "%8.2f", 100.0 * row["eer"].get<double>());
        txt << buf;
      }
      txt << '\n';
    }
  }

  StageResult r;
  r.written += write_if_changed(ws.report() / "summary.json", summary.dump(2) + "\n");
  r.written += write_if_changed(ws.report() / "summary.txt", txt.str());
  r.summary = txt.str();
  return r;
}

StageResult run_all(const RunConfig &cfg, bool force) {
  StageResult total;
  auto add = [&](const StageResult &s) {
    total.written += s.written;
    total.skipped += s.skipped;
    log_info(s.summary);
  };
  if (force || !fs::exists(cfg.corpus_manifest)) add(stage_demo(cfg, force));
  add(stage_build_addc(cfg, force));
  add(stage_augment(cfg, force));
  for (const char *set : {"original", "augmented", "addc"}) add(stage_features(cfg, set, force));
  for (TrainSet s : {TrainSet::Original, TrainSet::Augmented}) {
    add(stage_train(cfg, s, force));
    add(stage_eval(cfg, s, force));
  }
  const StageResult rep = stage_report(cfg);
  total.written += rep.written;
  total.summary = rep.summary;
  return total;
}

}  // namespace addbench
