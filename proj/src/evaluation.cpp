// src/evaluation.cpp

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

#include "addbench/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "addbench/error.hpp"

namespace addbench {

namespace {

void split_by_label(std::span<const double> scores, std::span<const Label> labels, std::vector<double> &bona,
                    std::vector<double> &fake) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores vs labels");
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] == Label::Bonafide ? bona : fake).push_back(scores[i]);
  if (bona.empty() || fake.empty()) throw Error(ErrorCode::OneClassOnly, "need both bonafide and fake scores");
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

}  // namespace

EerResult eer(std::span<const double> scores, std::span<const Label> labels) {
  std::vector<double> bona, fake;
  split_by_label(scores, labels, bona, fake);
  std::sort(bona.begin(), bona.end());
  std::sort(fake.begin(), fake.end());
  std::vector<double> candidates(scores.begin(), scores.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  const double nb = static_cast<double>(bona.size()), nf = static_cast<double>(fake.size());
  EerResult best;
  double best_gap = 2.0, best_sum = 3.0;
  for (double t : candidates) {
    const auto below_b = std::lower_bound(bona.begin(), bona.end(), t) - bona.begin();
    const auto below_f = std::lower_bound(fake.begin(), fake.end(), t) - fake.begin();
    const double fnr = static_cast<double>(below_b) / nb;
    const double fpr = static_cast<double>(static_cast<long>(fake.size()) - below_f) / nf;
    const double gap = std::abs(fnr - fpr);
    const double sum = fnr + fpr;
    if (gap < best_gap || (gap == best_gap && sum < best_sum)) {
      best_gap = gap;
      best_sum = sum;
      best = {sum / 2.0, t, fnr, fpr, false};
    }
  }
  best.inverted = best.eer > 0.5;
  return best;
}

double auc(std::span<const double> scores, std::span<const Label> labels) {
  std::vector<double> bona, fake;
  split_by_label(scores, labels, bona, fake);
  std::vector<std::pair<double, bool>> all;
  all.reserve(scores.size());
  for (double s : bona) all.emplace_back(s, true);
  for (double s : fake) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    // Ranks i+1..j share the midrank.
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second) rank_sum += mid;
    i = j;
  }
  const double nb = static_cast<double>(bona.size()), nf = static_cast<double>(fake.size());
  const double u = rank_sum - nb * (nb + 1.0) / 2.0;
  return u / (nb * nf);
}

double f1(std::span<const double> scores, std::span<const Label> labels, double threshold) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores vs labels");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_fake = scores[i] < threshold;
    const bool is_fake = labels[i] == Label::Fake;
    if (predicted_fake && is_fake) ++tp;
    else if (predicted_fake) ++fp;
    else if (is_fake) ++fn;
  }
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

void write_score_file(const std::filesystem::path &path, const ScoreSet &scores) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << "utterance_id,condition,score,label\n";
  for (const auto &e : scores)
    out << e.item_id << ',' << e.condition << ',' << fmt17(e.score) << ',' << to_string(e.label) << '\n';
}

ScoreSet read_score_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::string line;
  std::getline(in, line);
  if (trim(line) != "utterance_id,condition,score,label")
    throw Error(ErrorCode::BadManifest, path.string() + ": unexpected score header");
  ScoreSet out;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 4) throw Error(ErrorCode::BadManifest, path.string() + ": bad row '" + line + "'");
    auto label = parse_label(f[3]);
    if (!label) throw Error(ErrorCode::BadLabel, f[3]);
    ScoreEntry e;
    e.item_id = f[0];
    e.condition = f[1];
    try {
      e.score = std::stod(f[2]);
    } catch (const std::exception &) {
      throw Error(ErrorCode::BadManifest, path.string() + ": bad score '" + f[2] + "'");
    }
    e.label = *label;
    out.push_back(std::move(e));
  }
  return out;
}

ConditionMetrics compute_metrics(const std::string &tag, std::span<const double> scores,
                                 std::span<const Label> labels) {
  ConditionMetrics m;
  m.tag = tag;
  const auto e = eer(scores, labels);
  m.eer = e.eer;
  m.threshold = e.threshold;
  m.inverted = e.inverted;
  m.auc = auc(scores, labels);
  m.f1 = f1(scores, labels, e.threshold);
  for (Label l : labels) (l == Label::Bonafide ? m.n_bonafide : m.n_fake)++;
  return m;
}

const ConditionMetrics &EvalReport::condition(const std::string &tag) const {
  for (const auto &c : conditions)
    if (c.tag == tag) return c;
  throw Error(ErrorCode::MissingScores, tag);
}

EvalReport evaluate_conditions(const ScoreSet &scores, const ConditionSet &set,
                               std::map<std::string, std::string> metadata) {
  std::map<std::pair<std::string, std::string>, double> lookup;
  for (const auto &e : scores) lookup[{e.condition, e.item_id}] = e.score;

  std::vector<std::string> missing;
  EvalReport report;
  report.metadata = std::move(metadata);
  for (int n = 0; n < kConditionCount; ++n) {
    const std::string tag = condition_tag(n);
    std::vector<double> s;
    std::vector<Label> l;
    std::map<std::string, std::pair<std::vector<double>, std::vector<Label>>> by_codec;
    for (const auto &item : set.items(n)) {
      auto it = lookup.find({tag, item.item_id});
      if (it == lookup.end()) {
        missing.push_back(tag + ":" + item.item_id);
        continue;
      }
      s.push_back(it->second);
      l.push_back(item.utterance.label);
      if (n > 0) {
        by_codec[item.codec_name].first.push_back(it->second);
        by_codec[item.codec_name].second.push_back(item.utterance.label);
      }
    }
    if (!missing.empty()) continue;
    report.conditions.push_back(compute_metrics(tag, s, l));
    for (const auto &[codec, sl] : by_codec) report.per_codec[codec].push_back(compute_metrics(tag, sl.first, sl.second));
  }
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " missing:";
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) msg += " " + missing[i];
    if (missing.size() > 10) msg += " ...";
    throw Error(ErrorCode::MissingScores, msg);
  }
  const auto &c0 = report.conditions.front();
  for (std::size_t n = 1; n < report.conditions.size(); ++n) {
    const auto &c = report.conditions[n];
    report.deltas[c.tag] = {c.eer - c0.eer, c.auc - c0.auc, c.f1 - c0.f1};
  }
  if (report.conditions.size() > 1) {
    const auto &c1 = report.conditions[1];
    report.c0_to_c1_degradation = {c1.eer - c0.eer, c0.auc - c1.auc, c0.f1 - c1.f1};
  }
  return report;
}

namespace {

nlohmann::ordered_json metrics_json(const ConditionMetrics &m) {
  nlohmann::ordered_json j;
  j["condition"] = m.tag;
  j["eer"] = m.eer;
  j["eer_percent"] = 100.0 * m.eer;
  j["auc"] = m.auc;
  j["f1"] = m.f1;
  j["threshold"] = m.threshold;
  j["n_bonafide"] = m.n_bonafide;
  j["n_fake"] = m.n_fake;
  j["polarity_inverted"] = m.inverted;
  return j;
}

}  // namespace

std::string report_json(const EvalReport &r) {
  nlohmann::ordered_json j;
  j["conditions"] = nlohmann::ordered_json::array();
  for (const auto &c : r.conditions) j["conditions"].push_back(metrics_json(c));
  nlohmann::ordered_json deltas;
  for (const auto &[tag, d] : r.deltas) deltas[tag] = {{"eer", d.eer}, {"auc", d.auc}, {"f1", d.f1}};
  j["deltas_vs_C0"] = deltas;
  j["c0_to_c1_degradation"] = {{"eer", r.c0_to_c1_degradation.eer},
                               {"auc", r.c0_to_c1_degradation.auc},
                               {"f1", r.c0_to_c1_degradation.f1}};
  nlohmann::ordered_json codecs;
  for (const auto &[codec, rows] : r.per_codec) {
    codecs[codec] = nlohmann::ordered_json::array();
    for (const auto &m : rows) codecs[codec].push_back(metrics_json(m));
  }
  j["per_codec"] = codecs;
  nlohmann::ordered_json meta;
  for (const auto &[k, v] : r.metadata) meta[k] = v;
  j["metadata"] = meta;
  return j.dump(2) + "\n";
}

std::string report_text(const EvalReport &r) {
  std::ostringstream os;
  os << std::fixed;
  os << std::left << std::setw(6) << "cond" << std::right << std::setw(10) << "EER(%)" << std::setw(10) << "AUC"
     << std::setw(10) << "F1" << std::setw(12) << "dEER(pp)" << std::setw(10) << "dAUC" << std::setw(10) << "dF1"
     << std::setw(8) << "n" << '\n';
  for (const auto &c : r.conditions) {
    MetricDelta d;
    if (auto it = r.deltas.find(c.tag); it != r.deltas.end()) d = it->second;
    os << std::left << std::setw(6) << c.tag << std::right << std::setprecision(2) << std::setw(10) << 100.0 * c.eer
       << std::setprecision(4) << std::setw(10) << c.auc << std::setw(10) << c.f1 << std::setprecision(2)
       << std::setw(12) << 100.0 * d.eer << std::setprecision(4) << std::setw(10) << d.auc << std::setw(10) << d.f1
       << std::setw(8) << (c.n_bonafide + c.n_fake) << (c.inverted ? "  (inverted polarity)" : "") << '\n';
  }
  os << "C0->C1 degradation: EER " << std::setprecision(2) << 100.0 * r.c0_to_c1_degradation.eer << " pp, AUC "
     << 100.0 * r.c0_to_c1_degradation.auc << " pp, F1 " << 100.0 * r.c0_to_c1_degradation.f1 << " pp\n";
  if (!r.per_codec.empty()) {
    os << "\nper-codec EER(%)\n" << std::left << std::setw(10) << "codec";
    for (int n = 1; n < kConditionCount; ++n) os << std::right << std::setw(8) << condition_tag(n);
    os << '\n';
    for (const auto &[codec, rows] : r.per_codec) {
      os << std::left << std::setw(10) << codec;
      for (const auto &m : rows) os << std::right << std::setw(8) << std::setprecision(2) << 100.0 * m.eer;
      os << '\n';
    }
  }
  if (!r.metadata.empty()) {
    os << "\nmetadata\n";
    for (const auto &[k, v] : r.metadata) os << "  " << k << " = " << v << '\n';
  }
  return os.str();
}

std::string report_csv(const EvalReport &r) {
  std::ostringstream os;
  os << "condition,eer,auc,f1,threshold,n_bonafide,n_fake\n";
  for (const auto &c : r.conditions)
    os << c.tag << ',' << fmt17(c.eer) << ',' << fmt17(c.auc) << ',' << fmt17(c.f1) << ',' << fmt17(c.threshold)
       << ',' << c.n_bonafide << ',' << c.n_fake << '\n';
  return os.str();
}

}  // namespace addbench
