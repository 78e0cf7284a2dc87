// tests/ConfigPipelineTest.cpp

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
#include <chrono>
#include <functional>
#include <fstream>

#include <gtest/gtest.h>

#include "TestUtils.hpp"
#include "addbench/config.hpp"
#include "addbench/error.hpp"
#include "addbench/pipeline.hpp"
#include "json.hpp"

using namespace addbench;
using addbench::test::TempDir;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::BadConfig;
}

const char *kSmallConfig = R"(
seed = 11
workers = 1

[paths]
corpus_manifest = corpus/manifest.csv
work_dir = work

[addc]
per_dataset = 1

[demo]
per_class = 20

[detector]
model = gmm
components = 4
max_iterations = 20
max_frames = 4000
)";

RunConfig small_config(const fs::path &dir) {
  return make_run_config(KeyValueConfig::parse(kSmallConfig), dir);
}

std::map<fs::path, fs::file_time_type> mtimes(const fs::path &root) {
  std::map<fs::path, fs::file_time_type> out;
  for (const auto &e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[e.path()] = e.last_write_time();
  return out;
}

}  // namespace

TEST(KeyValueConfigTest, ParsesSectionsAndComments) {
  const auto kv = KeyValueConfig::parse("seed = 3 \n# c\n; c\n[channel]\nconcealment=repeat_previous\n");
  EXPECT_EQ(kv.get("run.seed"), "3");
  EXPECT_EQ(kv.get("channel.concealment"), "repeat_previous");
  EXPECT_FALSE(kv.get("channel.frame_ms").has_value());
}

TEST(RunConfigTest, Defaults) {
  const RunConfig cfg = make_run_config(KeyValueConfig::parse("seed=5"), "/base");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.work_dir, fs::path("/base/work"));
  EXPECT_EQ(cfg.corpus_manifest, fs::path("/base/corpus/manifest.csv"));
  EXPECT_EQ(cfg.codecs.size(), 6u);
  EXPECT_EQ(cfg.feature, FeatureKind::Lfcc);
  EXPECT_EQ(cfg.concealment, Concealment::ZeroFill);
  EXPECT_EQ(cfg.gmm.seed, 5u);
  EXPECT_EQ(cfg.train.seed, 5u);
}

TEST(RunConfigTest, Rejections) {
  EXPECT_EQ(code_of([] { make_run_config(KeyValueConfig::parse("workers=2"), "."); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { make_run_config(KeyValueConfig::parse("seed=1\nbogus=2"), "."); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { make_run_config(KeyValueConfig::parse("seed=1\n[channel]\nconcealment=magic"), "."); }),
            ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { make_run_config(KeyValueConfig::parse("seed=1\n[codec.AMR-WB]\nbitrate_kbps=40"), "."); }),
            ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { make_run_config(KeyValueConfig::parse("seed=1\n[codec.NOPE]\nbitrate_kbps=8"), "."); }),
            ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { make_run_config(KeyValueConfig::parse("seed=x"), "."); }), ErrorCode::BadConfig);
}

TEST(RunConfigTest, OverridesAndDigest) {
  auto kv = KeyValueConfig::parse("seed=1\n[codec.OPUS]\nbitrate_kbps=24\n[channel]\nloss_model=gilbert_elliott\n");
  const RunConfig a = make_run_config(kv, ".");
  const auto opus = std::find_if(a.codecs.begin(), a.codecs.end(), [](const CodecSpec &c) { return c.name == "OPUS"; });
  ASSERT_NE(opus, a.codecs.end());
  EXPECT_DOUBLE_EQ(opus->bitrate_kbps, 24.0);
  EXPECT_EQ(a.loss_kind, LossKind::GilbertElliott);
  EXPECT_EQ(make_run_config(kv, ".").digest, a.digest);
  kv.set("run.seed", "2");
  EXPECT_NE(make_run_config(kv, ".").digest, a.digest);
  EXPECT_EQ(canonical_text(KeyValueConfig::parse("b=1\na=2")), "run.a=2\nrun.b=1\n");
}

TEST(PipelineTest, StagesRequireTheirInputs) {
  TempDir dir("stages");
  const RunConfig cfg = small_config(dir.path());
  EXPECT_EQ(code_of([&] { stage_build_addc(cfg, false); }), ErrorCode::StageInputMissing);
  EXPECT_EQ(code_of([&] { stage_eval(cfg, TrainSet::Original, false); }), ErrorCode::StageInputMissing);
  EXPECT_EQ(code_of([&] { stage_train(cfg, TrainSet::Original, false); }), ErrorCode::StageInputMissing);
  EXPECT_EQ(code_of([&] { stage_report(cfg); }), ErrorCode::StageInputMissing);
  try {
    stage_eval(cfg, TrainSet::Original, false);
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("first"), std::string::npos) << e.what();
  }
}

TEST(PipelineTest, SmallEndToEndWithCaching) {
  TempDir dir("e2e");
  const RunConfig cfg = small_config(dir.path());
  const auto start = std::chrono::steady_clock::now();
  stage_demo(cfg, false);
  stage_build_addc(cfg, false);
  stage_features(cfg, "original", false);
  stage_features(cfg, "addc", false);
  stage_train(cfg, TrainSet::Original, false);
  stage_eval(cfg, TrainSet::Original, false);
  stage_report(cfg);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 120.0);

  const Workspace ws{cfg.work_dir};
  for (int n = 0; n < 6; ++n) EXPECT_TRUE(fs::exists(ws.addc() / ("C" + std::to_string(n)) / "manifest.csv"));
  const fs::path report = ws.eval() / model_name(cfg, TrainSet::Original) / "report.json";
  ASSERT_TRUE(fs::exists(report));
  std::ifstream in(report);
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j["conditions"].size(), 6u);
  for (std::size_t n = 0; n < 6; ++n) {
    EXPECT_EQ(j["conditions"][n]["condition"], "C" + std::to_string(n));
    EXPECT_EQ(j["conditions"][n]["n_bonafide"].get<int>() + j["conditions"][n]["n_fake"].get<int>(), n == 0 ? 8 : 48);
  }
  EXPECT_EQ(j["metadata"]["master_seed"], "11");
  EXPECT_TRUE(j["metadata"].contains("assumption.features"));
  EXPECT_TRUE(j["metadata"].contains("assumption.truncation"));
  EXPECT_EQ(j["metadata"]["codec.AMR-WB"].get<std::string>().find("12.65"), 0u);
  const std::string text = test::read_bytes(report);
  EXPECT_EQ(text.find(dir.path().string()), std::string::npos);
  EXPECT_TRUE(fs::exists(ws.report() / "summary.json"));

  // Rerunning features is a cache hit: nothing rewritten.
  const auto before = mtimes(ws.root / "features");
  const StageResult again = stage_features(cfg, "original", false);
  EXPECT_EQ(again.written, 0u);
  EXPECT_EQ(mtimes(ws.root / "features"), before);

  // Editing the training pool invalidates the original-set cache.
  {
    std::ifstream pin(ws.training_pool());
    std::string header, first, rest, line;
    std::getline(pin, header);
    std::getline(pin, first);
    while (std::getline(pin, line)) rest += line + "\n";
    std::ofstream pout(ws.training_pool(), std::ios::trunc);
    pout << header << "\n" << rest;
  }
  EXPECT_EQ(code_of([&] { stage_train(cfg, TrainSet::Original, true); }), ErrorCode::StaleCache);
}

class FrontEndPipelineTest : public ::testing::TestWithParam<std::pair<std::string, std::string>> {};

TEST_P(FrontEndPipelineTest, TrainsAndEvaluates) {
  const auto [feature, model] = GetParam();
  TempDir dir("fe");
  auto kv = KeyValueConfig::parse(kSmallConfig);
  kv.set("run.feature", feature);
  kv.set("detector.model", model);
  kv.set("detector.epochs", "3");
  kv.set("detector.batch_size", "8");
  const RunConfig cfg = make_run_config(kv, dir.path());
  stage_demo(cfg, false);
  stage_build_addc(cfg, false);
  stage_features(cfg, "original", false);
  stage_features(cfg, "addc", false);
  stage_train(cfg, TrainSet::Original, false);
  stage_eval(cfg, TrainSet::Original, false);

  const Workspace ws{cfg.work_dir};
  const std::string name = model_name(cfg, TrainSet::Original);
  EXPECT_EQ(name, model + "_" + feature + "_original");
  std::ifstream in(ws.eval() / name / "report.json");
  const auto j = nlohmann::json::parse(in);
  ASSERT_EQ(j["conditions"].size(), 6u);
  for (const auto &c : j["conditions"]) {
    EXPECT_GE(c["eer"].get<double>(), 0.0);
    EXPECT_LE(c["eer"].get<double>(), 1.0);
  }
  EXPECT_EQ(j["metadata"]["feature"], feature);
  std::ifstream log_in(ws.models() / (name + ".json"));
  const auto log = nlohmann::json::parse(log_in);
  if (model == "mlp") {
    EXPECT_DOUBLE_EQ(log["learning_rate"].get<double>(), 1e-3);
    EXPECT_EQ(log["patience"], 3);
    EXPECT_TRUE(j["metadata"].contains("assumption.training"));
  } else {
    EXPECT_EQ(log["components"], 4);
  }
}

INSTANTIATE_TEST_SUITE_P(Combinations, FrontEndPipelineTest,
                         ::testing::Values(std::make_pair(std::string("cqcc"), std::string("gmm")),
                                           std::make_pair(std::string("raw"), std::string("gmm")),
                                           std::make_pair(std::string("lfcc"), std::string("mlp")),
                                           std::make_pair(std::string("raw"), std::string("mlp"))));
