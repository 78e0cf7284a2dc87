// tools/addbench.cpp

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

// Command-line entry point: one subcommand per pipeline stage plus a
// single-file channel simulator.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "addbench/audio.hpp"
#include "addbench/channel.hpp"
#include "addbench/codec.hpp"
#include "addbench/config.hpp"
#include "addbench/corpus.hpp"
#include "addbench/error.hpp"
#include "addbench/log.hpp"
#include "addbench/pipeline.hpp"

namespace {

using namespace addbench;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string toolchain() {
  std::string s = "addbench " ADDBENCH_VERSION;
#if defined(__clang__)
  s += " (clang " __clang_version__;
#elif defined(__GNUC__)
  s += " (g++ " __VERSION__;
#else
  s += " (unknown compiler";
#endif
  s += ", C++" + std::to_string(__cplusplus / 100 % 100) + ")";
  return s;
}

struct GlobalOptions {
  std::string config;
  std::vector<std::string> overrides;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string feature;
  std::string model;
  std::optional<std::size_t> components;
  std::string concealment;
  std::optional<std::size_t> per_dataset;
};

KeyValueConfig gather(const GlobalOptions &g) {
  KeyValueConfig kv;
  if (!g.config.empty()) kv = KeyValueConfig::load(g.config);
  for (const auto &o : g.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || o.find('.') > eq)
      throw Error(ErrorCode::BadConfig, "--set expects section.key=value, got '" + o + "'");
    kv.set(o.substr(0, eq), o.substr(eq + 1));
  }
  if (g.seed) kv.set("run.seed", std::to_string(*g.seed));
  if (g.workers) kv.set("run.workers", std::to_string(*g.workers));
  if (!g.feature.empty()) kv.set("run.feature", g.feature);
  if (!g.model.empty()) kv.set("detector.model", g.model);
  if (g.components) kv.set("detector.components", std::to_string(*g.components));
  if (!g.concealment.empty()) kv.set("channel.concealment", g.concealment);
  if (g.per_dataset) kv.set("addc.per_dataset", std::to_string(*g.per_dataset));
  return kv;
}

RunConfig load_config(const GlobalOptions &g) {
  const auto base = g.config.empty() ? std::filesystem::current_path()
                                     : std::filesystem::absolute(g.config).parent_path();
  return make_run_config(gather(g), base);
}

struct SimulateOptions {
  std::string in, out, codec = "identity", concealment = "zero_fill", loss = "bernoulli", mask_out;
  double plr = 0.0;
  double frame_ms = 20.0;
  std::uint64_t seed = 0;
};

int simulate(const SimulateOptions &o) {
  auto spec = o.codec == "identity" ? std::optional<CodecSpec>(identity_codec()) : find_codec(o.codec);
  if (!spec) throw Error(ErrorCode::BadSpec, "unknown codec '" + o.codec + "'");
  auto conceal_kind = parse_concealment(o.concealment);
  if (!conceal_kind) throw Error(ErrorCode::BadConfig, "unknown concealment '" + o.concealment + "'");
  auto loss_kind = parse_loss_kind(o.loss);
  if (!loss_kind) throw Error(ErrorCode::BadConfig, "unknown loss model '" + o.loss + "'");

  const AudioBuffer audio = normalize_audio(read_wave(o.in));
  ChannelCondition cond;
  cond.codec = *spec;
  cond.loss.kind = *loss_kind;
  cond.loss.plr = o.plr;
  cond.loss.seed = o.seed;
  cond.concealment = *conceal_kind;
  cond.frame_ms = o.frame_ms;
  const AudioBuffer out = transmit(audio, cond);
  write_wave(o.out, out);

  const auto mask = transmit_loss_mask(audio.samples.size(), cond);
  std::size_t lost = 0;
  for (bool m : mask) lost += m;
  std::printf("codec=%s plr=%g seed=%llu packets=%zu lost=%zu (%.2f%%)\nmask=%s\n", spec->name.c_str(), o.plr,
              static_cast<unsigned long long>(o.seed), mask.size(), lost,
              mask.empty() ? 0.0 : 100.0 * static_cast<double>(lost) / static_cast<double>(mask.size()),
              mask_to_bits(mask).c_str());
  if (!o.mask_out.empty()) {
    std::FILE *f = std::fopen(o.mask_out.c_str(), "w");
    if (!f) throw Error(ErrorCode::MissingFile, "cannot write " + o.mask_out);
    std::fprintf(f, "%s\n", mask_to_bits(mask).c_str());
    std::fclose(f);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Audio deepfake detection robustness benchmark"};
  app.require_subcommand(0, 1);
  GlobalOptions g;
  bool version = false;
  app.add_flag("--version", version, "Print toolchain and config digest");
  app.add_option("-c,--config", g.config, "Run configuration file");
  app.add_option("--set", g.overrides, "Override a config key: section.key=value");
  app.add_flag("-f,--force", g.force, "Redo work even when valid outputs exist");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--workers", g.workers, "Parallelism cap")->check(CLI::PositiveNumber);
  app.add_option("--feature", g.feature, "Feature kind")->check(CLI::IsMember({"lfcc", "cqcc", "raw"}));
  app.add_option("--model", g.model, "Detector kind")->check(CLI::IsMember({"gmm", "mlp"}));
  app.add_option("-K,--components", g.components, "GMM components per class")->check(CLI::PositiveNumber);
  app.add_option("--concealment", g.concealment, "Packet loss concealment")
      ->check(CLI::IsMember({"zero_fill", "repeat_previous", "linear_interp"}));
  app.add_option("--per-dataset", g.per_dataset, "Test utterances per class and source");

  SimulateOptions sim;
  auto *cmd_sim = app.add_subcommand("simulate", "Send one file through codec and lossy channel");
  cmd_sim->add_option("--in", sim.in, "Input WAVE")->required()->check(CLI::ExistingFile);
  cmd_sim->add_option("--out", sim.out, "Output WAVE")->required();
  cmd_sim->add_option("--codec", sim.codec, "Codec name or 'identity'");
  cmd_sim->add_option("--plr", sim.plr, "Packet loss rate in [0, 1]")->check(CLI::Range(0.0, 1.0));
  cmd_sim->add_option("--seed", sim.seed, "Loss mask seed");
  cmd_sim->add_option("--concealment", sim.concealment, "zero_fill, repeat_previous or linear_interp");
  cmd_sim->add_option("--loss-model", sim.loss, "bernoulli or gilbert_elliott");
  cmd_sim->add_option("--frame-ms", sim.frame_ms, "Packet duration")->check(CLI::PositiveNumber);
  cmd_sim->add_option("--mask-out", sim.mask_out, "Write the loss mask here");

  auto *cmd_demo = app.add_subcommand("demo", "Generate the synthetic corpus");
  auto *cmd_addc = app.add_subcommand("build-addc", "Build and render the six-condition test set");
  auto *cmd_aug = app.add_subcommand("augment", "Build and render the augmented training set");
  std::string feature_set = "all";
  auto *cmd_feat = app.add_subcommand("features", "Extract and cache features");
  cmd_feat->add_option("set", feature_set, "original, augmented, addc or all")
      ->check(CLI::IsMember({"original", "augmented", "addc", "all"}));
  std::string train_set = "original";
  auto *cmd_train = app.add_subcommand("train", "Fit the configured detector");
  cmd_train->add_option("--train-set", train_set, "original or augmented")
      ->check(CLI::IsMember({"original", "augmented"}));
  std::string scores;
  auto *cmd_eval = app.add_subcommand("eval", "Score the test set and write reports");
  cmd_eval->add_option("--train-set", train_set, "original or augmented")
      ->check(CLI::IsMember({"original", "augmented"}));
  cmd_eval->add_option("--scores", scores, "Evaluate an external score CSV instead of a model");
  auto *cmd_report = app.add_subcommand("report", "Merge evaluation reports");
  auto *cmd_run = app.add_subcommand("run", "Run every stage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (version) {
      std::cout << toolchain() << '\n';
      if (!g.config.empty() || !g.overrides.empty()) std::cout << "config digest " << hex_digest(canonical_text(gather(g))) << '\n';
      else std::cout << "config digest none\n";
      return kExitOk;
    }
    if (*cmd_sim) return simulate(sim);
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kExitUsage;
    }
    const RunConfig cfg = load_config(g);
    const TrainSet ts = *parse_train_set(train_set);
    auto show = [](const StageResult &r) { std::cout << r.summary << '\n'; };
    if (*cmd_demo) show(stage_demo(cfg, g.force));
    else if (*cmd_addc) show(stage_build_addc(cfg, g.force));
    else if (*cmd_aug) show(stage_augment(cfg, g.force));
    else if (*cmd_feat) {
      if (feature_set == "all")
        for (const char *s : {"original", "augmented", "addc"}) show(stage_features(cfg, s, g.force));
      else
        show(stage_features(cfg, feature_set, g.force));
    } else if (*cmd_train) show(stage_train(cfg, ts, g.force));
    else if (*cmd_eval) {
      std::optional<std::filesystem::path> ext;
      if (!scores.empty()) ext = scores;
      show(stage_eval(cfg, ts, g.force, ext));
    } else if (*cmd_report) show(stage_report(cfg));
    else if (*cmd_run) show(run_all(cfg, g.force));
    return kExitOk;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::BadConfig ? kExitUsage : kExitRuntime;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
