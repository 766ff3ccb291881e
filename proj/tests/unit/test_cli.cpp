// Copyright 2026 The slamkit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace slamkit::cli {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "slamkit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int count_lines(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  int n = 0;
  while (std::getline(f, line)) ++n;
  return n;
}

// A tiny configuration shared by the pipeline tests; outputs go under a
// per-process temporary root.
class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / ("slamkit_cli_" + std::to_string(::getpid()));
    fs::remove_all(root_);
    fs::create_directories(root_);
    config_ = (root_ / "tiny.json").string();
    std::ofstream(config_) << R"({"lm": {"d_model": 16, "d_ff": 32, "n_heads": 2},
      "pretrain": {"train_size": 60, "dev_size": 10, "max_epochs": 1, "min_accuracy": 0.0},
      "corpus": {"train_size": 16, "dev_size": 4, "test_size": 6},
      "projector": {"hidden": 16}, "train": {"max_epochs": 1}, "decode": {"max_len": 12}})";
    ::setenv(kOutputRootEnv, (root_ / "out").c_str(), 1);
    ASSERT_EQ(run({"pretrain-lm", "--config", config_}).code, 0);
    ASSERT_EQ(run({"synth", "--config", config_}).code, 0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(root_);
    ::unsetenv(kOutputRootEnv);
  }

  static fs::path root_;
  static std::string config_;
};

fs::path CliPipeline::root_;
std::string CliPipeline::config_;

TEST_F(CliPipeline, SynthWritesManifestsAndConfig) {
  EXPECT_EQ(count_lines(root_ / "out" / "synth" / "train.jsonl"), 16);
  EXPECT_EQ(count_lines(root_ / "out" / "synth" / "test.jsonl"), 6);
  EXPECT_TRUE(fs::exists(root_ / "out" / "synth" / "config.json"));
  EXPECT_TRUE(fs::exists(root_ / "out" / "pretrain-lm" / "lm.ckpt"));
}

TEST_F(CliPipeline, RefusesNonEmptyOutputWithoutOverwrite) {
  const CliRun r = run({"synth", "--config", config_});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_EQ(r.err.rfind("slamkit: error: kind=validation message=", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
  EXPECT_EQ(run({"synth", "--config", config_, "--overwrite", "--splits", "test"}).code, 0);
}

TEST_F(CliPipeline, TempoSweepWritesElevenRows) {
  ASSERT_EQ(run({"train-ctc", "--config", config_}).code, 0);
  const CliRun r = run({"sweep", "--config", config_, "--set", "system=ctc", "--kind", "tempo"});
  ASSERT_EQ(r.code, 0) << r.err;
  const fs::path dir = root_ / "out" / "sweep";
  EXPECT_EQ(count_lines(dir / "aggregate.csv"), 12);
  EXPECT_EQ(count_lines(dir / "utterances.csv"), 1 + 11 * 6);
  EXPECT_EQ(count_lines(dir / "scatter_fit.csv"), 12);
  EXPECT_TRUE(fs::exists(dir / "scatter" / "tempo=0.5.csv"));
  EXPECT_TRUE(fs::exists(dir / "sweep.json"));
}

TEST_F(CliPipeline, EvalAlignReport) {
  ASSERT_EQ(run({"train", "--config", config_, "--out", (root_ / "out" / "train").string()}).code, 0);
  const CliRun e = run({"eval", "--config", config_});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(count_lines(root_ / "out" / "eval" / "utterances.csv"), 7);
  const CliRun a = run({"align", "--config", config_, "--oracle", "--utterance", "test-00001"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(fs::exists(root_ / "out" / "align" / "test-00001" / "map.csv"));
  const CliRun rep = run({"report", "--config", config_});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_NE(rep.out.find("toy"), std::string::npos);
}

TEST_F(CliPipeline, MissingUtteranceIsValidation) {
  const CliRun a = run({"align", "--config", config_, "--oracle", "--utterance", "nope", "--out",
                     (root_ / "x").string()});
  EXPECT_EQ(a.code, kExitValidation);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  const CliRun r = run({"train", "--bogus"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(r.err.rfind("slamkit: error: kind=usage", 0), 0u);
  EXPECT_EQ(run({"eval", "--workers", "-1"}).code, kExitUsage);
}

TEST(Cli, HelpSucceeds) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("sweep"), std::string::npos);
  const CliRun s = run({"sweep", "--help"});
  EXPECT_EQ(s.code, 0);
  EXPECT_NE(s.out.find("--kind"), std::string::npos);
}

TEST(Cli, UnknownConfigKeyIsValidation) {
  const CliRun r = run({"selftest", "--set", "train.bogus=1"});
  EXPECT_EQ(r.code, kExitValidation);
  EXPECT_NE(r.err.find("train.bogus"), std::string::npos);
}

TEST(Cli, SelftestPrintsEverySuite) {
  const CliRun r = run({"selftest", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.out;
  for (const char* s : {"PASS ctc-oracle", "PASS grad-check", "PASS snr", "PASS tsm", "PASS wer"}) {
    EXPECT_NE(r.out.find(s), std::string::npos) << r.out;
  }
}

}  // namespace
}  // namespace slamkit::cli
