// tests/acceptance.cpp

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

// Acceptance suite: one PASS/FAIL line per criterion with the measured
// values. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <unistd.h>

#include "addbench/config.hpp"
#include "addbench/datasetgen.hpp"
#include "addbench/detector.hpp"
#include "addbench/evaluation.hpp"
#include "addbench/features.hpp"
#include "addbench/log.hpp"
#include "addbench/pipeline.hpp"
#include "addbench/rng.hpp"
#include "addbench/synth.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace addbench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char *f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

class Scratch {
 public:
  explicit Scratch(const std::string &tag) {
    path_ = fs::temp_directory_path() / ("addbench_acc_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path &path() const { return path_; }

 private:
  fs::path path_;
};

Manifest synthetic_manifest(std::size_t per_class, const std::vector<std::string> &sources) {
  std::vector<Utterance> rows;
  for (const auto &src : sources)
    for (std::size_t i = 0; i < per_class; ++i) {
      rows.push_back({src + "_b" + std::to_string(i), Label::Bonafide, src, "", "b.wav"});
      rows.push_back({src + "_f" + std::to_string(i), Label::Fake, src, "alg" + std::to_string(i % 3), "f.wav"});
    }
  return Manifest(rows);
}

// 1. Six-condition test-set cardinalities.
Outcome criterion1() {
  Outcome o;
  const ConditionSet full = build_addc(synthetic_manifest(600, {"FoR", "W&L", "M&M", "ASV"}), 500, 1);
  bool ok = full.c0.size() == 4000;
  for (int n = 1; n <= 5; ++n) ok = ok && full.items(n).size() == 24000;

  Scratch dir("c1");
  DemoCorpusOptions demo;
  demo.per_class = 60;
  const Manifest corpus = generate_demo_corpus(dir.path() / "corpus", demo);
  const auto t0 = std::chrono::steady_clock::now();
  ConditionSet reduced = build_addc(corpus, 10, 1);
  render_condition_set(reduced, dir.path() / "addc", RenderOptions{});
  const double secs = seconds_since(t0);
  ok = ok && reduced.c0.size() == 80;
  std::size_t rendered = 0;
  for (int n = 0; n < kConditionCount; ++n) {
    if (n > 0) ok = ok && reduced.items(n).size() == 480;
    for (const auto &item : reduced.items(n)) rendered += fs::exists(item.audio);
  }
  ok = ok && rendered == 80 + 5 * 480;
  o.pass = ok && secs < 60.0;
  o.detail = "full |C0|=" + std::to_string(full.c0.size()) + " |C1..C5|=" + std::to_string(full.items(1).size()) +
             "; reduced |C0|=" + std::to_string(reduced.c0.size()) + " |Cn|=" + std::to_string(reduced.items(1).size()) +
             " rendered=" + std::to_string(rendered) + " in " + fmt("%.1f s", secs);
  return o;
}

// 2. Augmentation size law and stratum balance.
Outcome criterion2() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string sizes;
  int worst_spread = 0;
  for (std::size_t n : {60u, 120u, 1000u}) {
    std::vector<Utterance> rows;
    Rng rng(n);
    for (std::size_t i = 0; i < n; ++i) {
      const bool fake = i % 2 == 1;
      rows.push_back({"u" + std::to_string(i), fake ? Label::Fake : Label::Bonafide, "S",
                      fake ? "alg" + std::to_string(rng.below(4)) : "", "x.wav"});
    }
    const Manifest m(rows);
    const AugmentPlan plan = build_augmented(m, 3);
    ok = ok && plan.items.size() == 5 * n && plan.predicted_size() == 5 * n;
    sizes += " N=" + std::to_string(n) + "->" + std::to_string(plan.items.size());
    std::map<std::string, const Utterance *> by_id;
    for (const auto &u : m.entries()) by_id[u.id] = &u;
    std::map<std::pair<int, std::string>, std::vector<int>> strata;
    for (std::size_t k = 0; k < plan.subsets.size(); ++k)
      for (const auto &id : plan.subsets[k]) {
        auto &v = strata[{static_cast<int>(by_id.at(id)->label), by_id.at(id)->algorithm}];
        v.resize(plan.subsets.size(), 0);
        ++v[k];
      }
    for (const auto &[key, v] : strata)
      worst_spread = std::max(worst_spread, *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()));
  }
  // Rendered count on a small real corpus.
  Scratch dir("c2");
  DemoCorpusOptions demo;
  demo.per_class = 30;
  demo.sources = {"A", "B"};
  const Manifest corpus = generate_demo_corpus(dir.path() / "corpus", demo);
  AugmentPlan plan = build_augmented(corpus, 3);
  render_augmented(plan, dir.path() / "aug", RenderOptions{});
  const std::size_t rendered = load_manifest(dir.path() / "aug" / "manifest.csv").size();
  ok = ok && rendered == 5 * corpus.size();
  const double secs = seconds_since(t0);
  o.pass = ok && worst_spread <= 1 && secs < 120.0;
  o.detail = "sizes" + sizes + "; rendered N=" + std::to_string(corpus.size()) + "->" + std::to_string(rendered) +
             "; max stratum spread=" + std::to_string(worst_spread) + "; " + fmt("%.1f s", secs);
  return o;
}

// 3. Feature geometry.
Outcome criterion3() {
  std::vector<AudioBuffer> inputs;
  inputs.push_back(AudioBuffer{std::vector<std::int16_t>(kUtteranceLength, 0), kPipelineRate});
  Rng rng(3);
  AudioBuffer noise;
  noise.samples.resize(kUtteranceLength);
  for (auto &s : noise.samples) s = static_cast<std::int16_t>(rng.uniform(-30000.0, 30000.0));
  inputs.push_back(noise);
  inputs.push_back(AudioBuffer{std::vector<std::int16_t>(kUtteranceLength, 32767), kPipelineRate});
  inputs.push_back(fix_length(synth_utterance(Label::Bonafide, 4)));
  inputs.push_back(fix_length(synth_utterance(Label::Fake, 5)));
  bool ok = true;
  std::string shapes;
  for (const auto &a : inputs) {
    const auto l = extract_features(FeatureKind::Lfcc, a);
    const auto c = extract_features(FeatureKind::Cqcc, a);
    const auto r = extract_features(FeatureKind::Raw, a);
    ok = ok && l.dim == 60 && l.frames == 126 && c.dim == 60 && c.frames == 501 && r.dim == 1 && r.frames == 64000;
    for (const auto *f : {&l, &c, &r})
      ok = ok && std::all_of(f->data.begin(), f->data.end(), [](double v) { return std::isfinite(v); });
    if (shapes.empty())
      shapes = "lfcc " + std::to_string(l.dim) + "x" + std::to_string(l.frames) + ", cqcc " + std::to_string(c.dim) +
               "x" + std::to_string(c.frames) + ", raw " + std::to_string(r.dim) + "x" + std::to_string(r.frames);
  }
  return {ok, shapes + " on " + std::to_string(inputs.size()) + " inputs"};
}

// 4. Metric oracles.
Outcome criterion4() {
  Rng rng(44);
  std::size_t eer_match = 0;
  double worst_auc = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(999);
    std::vector<double> s;
    std::vector<Label> l;
    const bool quantize = rng.below(3) == 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Label lab = i == 0 ? Label::Bonafide : i == 1 ? Label::Fake : (rng.below(2) ? Label::Fake : Label::Bonafide);
      double v = rng.normal() + (lab == Label::Bonafide ? 0.7 : 0.0);
      if (quantize) v = std::round(v * 10.0) / 10.0;
      s.push_back(v);
      l.push_back(lab);
    }
    // Brute force: every score as a threshold.
    double gap = INFINITY, sum = INFINITY, thr = INFINITY, best = 0.0;
    double nb = 0, nf = 0;
    for (auto lab : l) (lab == Label::Bonafide ? nb : nf) += 1;
    for (double t : s) {
      double fn = 0, fp = 0;
      for (std::size_t i = 0; i < n; ++i) (l[i] == Label::Bonafide ? fn : fp) += l[i] == Label::Bonafide ? s[i] < t : s[i] >= t;
      const double g = std::abs(fn / nb - fp / nf), su = fn / nb + fp / nf;
      if (g < gap || (g == gap && (su < sum || (su == sum && t < thr)))) gap = g, sum = su, thr = t, best = su / 2.0;
    }
    const EerResult e = eer(s, l);
    eer_match += e.eer == best && e.threshold == thr;
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (l[i] == Label::Bonafide && l[j] == Label::Fake) num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    worst_auc = std::max(worst_auc, std::abs(auc(s, l) - num / (nb * nf)));
  }
  const std::vector<double> ws = {0.9, 0.2, 0.8, 0.1};
  const std::vector<Label> wl = {Label::Bonafide, Label::Bonafide, Label::Fake, Label::Fake};
  const double we = eer(ws, wl).eer, wa = auc(ws, wl);
  const bool ok = eer_match == 200 && worst_auc < 1e-12 && we == 0.5 && wa == 0.75;
  return {ok, "EER exact on " + std::to_string(eer_match) + "/200, max |dAUC|=" + fmt("%.2e", worst_auc) +
                  ", worked example EER=" + fmt("%g", we) + " AUC=" + fmt("%g", wa)};
}

// 5. Bernoulli channel statistics.
Outcome criterion5() {
  bool ok = true;
  std::string detail;
  for (double plr : {0.01, 0.05, 0.10, 0.20}) {
    const double mean = 10000.0 * plr, sigma = std::sqrt(10000.0 * plr * (1.0 - plr));
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto mask = draw_loss_mask(10000, LossModel{LossKind::Bernoulli, plr, std::nullopt, derive_subseed(seed, "acc", 1, plr)});
      const double k = static_cast<double>(std::count(mask.begin(), mask.end(), true));
      inside += std::abs(k - mean) <= 3.0 * sigma;
    }
    ok = ok && inside >= 99;
    detail += fmt("PLR %.2f: ", plr) + std::to_string(inside) + "/100; ";
  }
  const auto none = draw_loss_mask(10000, LossModel{LossKind::Bernoulli, 0.0, std::nullopt, 9});
  const auto all = draw_loss_mask(10000, LossModel{LossKind::Bernoulli, 1.0, std::nullopt, 9});
  const auto lost0 = std::count(none.begin(), none.end(), true), lost1 = std::count(all.begin(), all.end(), true);
  ok = ok && lost0 == 0 && lost1 == 10000;
  return {ok, detail + "PLR 0 lost " + std::to_string(lost0) + ", PLR 1 lost " + std::to_string(lost1)};
}

std::vector<double> condition_eers(const fs::path &report_json) {
  std::ifstream in(report_json);
  const auto j = nlohmann::json::parse(in);
  std::vector<double> out;
  for (const auto &c : j["conditions"]) out.push_back(c["eer"].get<double>());
  return out;
}

RunConfig pipeline_config(const fs::path &base, const std::string &extra) {
  const std::string text =
      "seed = 11\nworkers = 1\nfeature = lfcc\n"
      "[paths]\ncorpus_manifest = corpus/manifest.csv\nwork_dir = work\n"
      "[detector]\nmodel = gmm\ncomponents = 16\nmax_frames = 20000\n" + extra;
  return make_run_config(KeyValueConfig::parse(text, "acceptance"), base);
}

std::string eer_list(const std::vector<double> &e) {
  std::string s;
  for (std::size_t n = 0; n < e.size(); ++n) s += (n ? " " : "") + ("C" + std::to_string(n)) + "=" + fmt("%.2f%%", 100 * e[n]);
  return s;
}

// 6 and 7 share one workspace: clean-trained vs augmented-trained GMM.
std::pair<Outcome, Outcome> criteria6and7() {
  Scratch dir("c67");
  const RunConfig cfg = pipeline_config(dir.path(), "[addc]\nper_dataset = 10\n[demo]\nper_class = 400\n");
  const Workspace ws{cfg.work_dir};

  auto t0 = std::chrono::steady_clock::now();
  stage_demo(cfg, false);
  stage_build_addc(cfg, false);
  stage_features(cfg, "original", false);
  stage_features(cfg, "addc", false);
  stage_train(cfg, TrainSet::Original, false);
  stage_eval(cfg, TrainSet::Original, false);
  const double t_clean = seconds_since(t0);
  const auto clean = condition_eers(ws.eval() / model_name(cfg, TrainSet::Original) / "report.json");

  t0 = std::chrono::steady_clock::now();
  stage_augment(cfg, false);
  stage_features(cfg, "augmented", false);
  stage_train(cfg, TrainSet::Augmented, false);
  stage_eval(cfg, TrainSet::Augmented, false);
  const double t_aug = seconds_since(t0);
  const auto aug = condition_eers(ws.eval() / model_name(cfg, TrainSet::Augmented) / "report.json");

  Outcome o6, o7;
  if (clean.size() != 6 || aug.size() != 6) {
    o6.detail = o7.detail = "report does not have six conditions";
    return {o6, o7};
  }
  const double hi = (clean[3] + clean[4] + clean[5]) / 3.0, lo = (clean[1] + clean[2]) / 2.0;
  o6.pass = clean[1] >= clean[0] && hi >= lo && clean[5] - clean[0] >= 0.02 && t_clean < 300.0;
  o6.detail = eer_list(clean) + fmt("; mean(C3..C5)=%.2f%%", 100 * hi) + fmt(" mean(C1,C2)=%.2f%%", 100 * lo) +
              fmt("; C5-C0=%.3f", clean[5] - clean[0]) + fmt("; %.0f s", t_clean);

  const auto spread = [](const std::vector<double> &e) {
    return *std::max_element(e.begin(), e.end()) - *std::min_element(e.begin(), e.end());
  };
  const auto mean15 = [](const std::vector<double> &e) { return std::accumulate(e.begin() + 1, e.end(), 0.0) / 5.0; };
  const double s_clean = spread(clean), s_aug = spread(aug);
  const double reduction = s_clean > 0 ? 1.0 - s_aug / s_clean : 0.0;
  o7.pass = s_clean > 0 && reduction >= 0.5 && mean15(aug) < mean15(clean) && t_clean + t_aug < 600.0;
  o7.detail = eer_list(aug) + fmt("; spread %.3f", s_clean) + fmt(" -> %.3f", s_aug) + fmt(" (-%.0f%%)", 100 * reduction) +
              fmt("; mean C1..C5 %.2f%%", 100 * mean15(clean)) + fmt(" -> %.2f%%", 100 * mean15(aug)) +
              fmt("; %.0f s", t_clean + t_aug);
  return {o6, o7};
}

// 8. Gradients, EM monotonicity, cross-entropy value.
Outcome criterion8() {
  Rng rng(8);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t in = 2 + rng.below(8), hidden = 1 + rng.below(8);
    MlpModel m(FeatureKind::Lfcc, in, hidden);
    for (auto &v : m.theta) v = rng.uniform(-1.0, 1.0);
    std::vector<std::vector<double>> x(12, std::vector<double>(in));
    std::vector<double> y(12);
    for (std::size_t j = 0; j < x.size(); ++j) {
      for (auto &v : x[j]) v = rng.uniform(-2.0, 2.0);
      y[j] = static_cast<double>(rng.below(2));
    }
    std::vector<double> g;
    mlp_loss_and_gradient(m, x, y, &g);
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      MlpModel p = m, q = m;
      p.theta[i] += 1e-5;
      q.theta[i] -= 1e-5;
      const double num = (mlp_loss_and_gradient(p, x, y, nullptr) - mlp_loss_and_gradient(q, x, y, nullptr)) / 2e-5;
      diff2 += (g[i] - num) * (g[i] - num);
      norm2 += std::max(g[i] * g[i], num * num);
    }
    worst_rel = std::max(worst_rel, std::sqrt(diff2) / std::max(std::sqrt(norm2), 1e-12));
  }

  std::size_t em_steps = 0, em_drops = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng r(100 + seed);
    std::vector<std::vector<double>> frames(600, std::vector<double>(3));
    for (std::size_t i = 0; i < frames.size(); ++i)
      for (auto &v : frames[i]) v = r.normal() * (1.0 + static_cast<double>(i % 3)) + 4.0 * static_cast<double>(i % 3);
    GmmFitOptions opts;
    opts.components = 4;
    opts.max_iterations = 40;
    opts.tolerance = 0.0;
    opts.seed = seed;
    const auto trace = gmm_fit(frames, opts).trace;
    for (std::size_t i = 1; i < trace.size(); ++i, ++em_steps) em_drops += trace[i] < trace[i - 1] - 1e-8;
  }
  const double ce = cross_entropy(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5});
  const bool ok = worst_rel < 1e-4 && em_drops == 0 && std::abs(ce - std::log(2.0)) < 1e-12;
  return {ok, "max grad rel err=" + fmt("%.2e", worst_rel) + "; EM drops " + std::to_string(em_drops) + "/" +
                  std::to_string(em_steps) + "; CE=" + fmt("%.15f", ce)};
}

bool artifact(const fs::path &rel) {
  const auto ext = rel.extension().string();
  const auto top = rel.begin()->string();
  return ext == ".wav" || ext == ".mask" || ext == ".csv" || top == "features" || top == "models" || top == "eval" || top == "report";
}

std::map<std::string, std::string> snapshot(const fs::path &root) {
  std::map<std::string, std::string> out;
  for (const auto &e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), root);
    if (!artifact(rel)) continue;
    out[rel.generic_string()] = file_digest(e.path());
  }
  return out;
}

// 9. Two full runs, byte-identical artifacts.
Outcome criterion9() {
  Scratch a("c9a"), b("c9b");
  const std::string extra = "[addc]\nper_dataset = 1\n[demo]\nper_class = 20\n";
  const RunConfig ca = pipeline_config(a.path(), extra), cb = pipeline_config(b.path(), extra);
  const auto t0 = std::chrono::steady_clock::now();
  run_all(ca, false);
  run_all(cb, false);
  const double secs = seconds_since(t0);
  const auto sa = snapshot(ca.work_dir), sb = snapshot(cb.work_dir);
  std::map<std::string, int> kinds;
  for (const auto &[rel, d] : sa) ++kinds[fs::path(rel).extension().string()];
  std::size_t differing = 0;
  std::string first_diff;
  for (const auto &[rel, d] : sa)
    if (!sb.contains(rel) || sb.at(rel) != d) {
      if (differing++ < 3) first_diff += " " + rel;
    }
  differing += sb.size() > sa.size() ? sb.size() - sa.size() : 0;
  std::string counts;
  for (const auto &[ext, n] : kinds) counts += " " + ext + ":" + std::to_string(n);
  const bool ok = differing == 0 && kinds[".wav"] > 0 && kinds[".feat"] > 0 && kinds[".model"] == 2 && kinds[".json"] > 0;
  return {ok, std::to_string(sa.size()) + " artifacts compared (" + counts.substr(1) + "), " + std::to_string(differing) +
                  " differ" + (first_diff.empty() ? "" : " (" + first_diff.substr(1) + ")") + "; " + fmt("%.0f s", secs)};
}

}  // namespace

int main() {
  set_log_sink([](LogLevel level, const std::string &msg) {
    if (level == LogLevel::Warning) std::fprintf(stderr, "warning: %s\n", msg.c_str());
  });
  const std::vector<std::pair<int, std::string>> names = {
      {1, "test-set cardinalities"}, {2, "augmentation size law"}, {3, "feature geometry"},
      {4, "metric oracle equivalence"}, {5, "channel statistics"}, {6, "robustness trend (clean-trained)"},
      {7, "augmentation mitigation"}, {8, "numerical soundness"}, {9, "determinism"}};
  std::map<int, Outcome> results;
  const auto guarded = [&](int id, const std::function<Outcome()> &fn) {
    try {
      results[id] = fn();
    } catch (const std::exception &e) {
      results[id] = {false, std::string("exception: ") + e.what()};
    }
  };
  guarded(1, criterion1);
  guarded(2, criterion2);
  guarded(3, criterion3);
  guarded(4, criterion4);
  guarded(5, criterion5);
  try {
    auto [o6, o7] = criteria6and7();
    results[6] = o6;
    results[7] = o7;
  } catch (const std::exception &e) {
    results[6] = results[7] = {false, std::string("exception: ") + e.what()};
  }
  guarded(8, criterion8);
  guarded(9, criterion9);

  int failed = 0;
  for (const auto &[id, name] : names) {
    const Outcome &o = results[id];
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(names.size()) - failed, names.size());
  return failed;
}
