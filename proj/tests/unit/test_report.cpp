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

#include <filesystem>
#include <fstream>

#include "slamkit/error.hpp"
#include "slamkit/report.hpp"

namespace slamkit {
namespace {

namespace fs = std::filesystem;

class ReportTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("slamkit_report_" + std::to_string(::getpid()) + "_" +
                                         ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  // One utterance row with the given counts.
  void eval_run(const std::string& name, const std::string& system, const std::string& tr,
                const std::string& ev, int n_ref, int subs, int ins) {
    const fs::path d = root_ / name;
    fs::create_directories(d);
    std::ofstream(d / "utterances.csv") << "utterance_id,condition,duration_s,n_ref,S,D,I,wer,runaway_flag\n"
                                        << "u0,none,1.000000," << n_ref << ',' << subs << ",0," << ins
                                        << ",0.000000,0\n";
    write_eval_marker(d.string(), system, tr, ev);
  }

  void sweep_run(const std::string& name, const std::string& system, PerturbKind kind) {
    const fs::path d = root_ / name;
    fs::create_directories(d);
    std::ofstream a(d / "aggregate.csv");
    a << "condition,pooled_wer,runaway_count\n";
    if (kind == PerturbKind::kTempo) {
      a << "tempo=0.5,0.400000,1\ntempo=1,0.100000,0\ntempo=1.5,inf,3\n";
    } else {
      a << "noise=0,0.900000,0\nnoise=30,0.050000,0\n";
    }
    write_sweep_marker(d.string(), system, kind);
  }

  fs::path root_;
};

TEST_F(ReportTest, EmptyDirectoryHasNothingToReport) {
  EXPECT_THROW(render_report(root_.string(), (root_ / "out").string()), ValidationError);
}

TEST_F(ReportTest, SingleInDomainRun) {
  eval_run("e", "connector", "toy", "toy", 1000, 355, 0);
  const ReportOutput r = render_report(root_.string(), (root_ / "out").string());
  EXPECT_NE(r.text.find("35.5*"), std::string::npos) << r.text;
  EXPECT_TRUE(fs::exists(root_ / "out" / "report.txt"));
}

TEST_F(ReportTest, ThreeByFourMatrixWithInfiniteCells) {
  const std::vector<std::string> train = {"ls", "sb", "ch"}, eval = {"ls", "sb", "ch", "toy"};
  int n = 0;
  for (const auto& tr : train) {
    for (const auto& ev : eval) {
      const bool blowup = tr == "ch" && ev == "toy";
      eval_run("run" + std::to_string(n++), "connector", tr, ev, 100, blowup ? 90 : 10, blowup ? 30 : 0);
    }
  }
  const ReportOutput r = render_report(root_.string(), (root_ / "out").string());
  EXPECT_NE(r.text.find("∞"), std::string::npos) << r.text;
  EXPECT_NE(r.text.find("10.0*"), std::string::npos);
  for (const auto& ev : eval) EXPECT_NE(r.text.find(ev), std::string::npos);
}

TEST_F(ReportTest, SweepChartsAndMissingBaselineNotice) {
  eval_run("e", "connector", "toy", "toy", 10, 1, 0);
  sweep_run("s1", "connector", PerturbKind::kTempo);
  sweep_run("s2", "ctc", PerturbKind::kTempo);
  sweep_run("s3", "connector", PerturbKind::kNoise);
  const ReportOutput r = render_report(root_.string(), (root_ / "out").string());
  EXPECT_TRUE(fs::exists(root_ / "out" / "wer_vs_ratio.svg"));
  EXPECT_TRUE(fs::exists(root_ / "out" / "wer_vs_snr.svg"));
  EXPECT_TRUE(fs::exists(root_ / "out" / "curve_tempo.csv"));
  ASSERT_EQ(r.notices.size(), 1u);
  EXPECT_NE(r.notices[0].find("noise"), std::string::npos);
  std::ifstream curve(root_ / "out" / "curve_tempo.csv");
  std::string header;
  std::getline(curve, header);
  EXPECT_NE(header.find("connector"), std::string::npos);
  EXPECT_NE(header.find("ctc"), std::string::npos);
}

TEST(LineChart, ClipsInfiniteValues) {
  const std::string svg =
      line_chart_svg("t", "x", {{"connector", {0.5, 1.0}, {0.1, std::numeric_limits<double>::infinity()}}});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("inf"), std::string::npos);
}

}  // namespace
}  // namespace slamkit
