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

#include <cmath>
#include <sstream>

#include "slamkit/error.hpp"
#include "slamkit/eval.hpp"

namespace slamkit {
namespace {

using Words = std::vector<std::string>;

TEST(Normalize, Rules) {
  EXPECT_EQ(normalize_text("Hello, world!"), (Words{"hello", "world"}));
  EXPECT_EQ(normalize_text("don't"), (Words{"don't"}));
  EXPECT_EQ(normalize_text("A  B\tC"), (Words{"a", "b", "c"}));
  EXPECT_TRUE(normalize_text("  ...  ").empty());
}

TEST(AlignEdit, Examples) {
  const WerReport same = align_edit(Words{"a", "b", "c"}, Words{"a", "b", "c"}).report;
  EXPECT_EQ(same.errors(), 0);
  EXPECT_EQ(same.wer(), 0.0);
  const WerReport r = align_edit(Words{"a", "b", "c"}, Words{"a", "x", "c", "d"}).report;
  EXPECT_EQ(r.substitutions, 1);
  EXPECT_EQ(r.deletions, 0);
  EXPECT_EQ(r.insertions, 1);
  EXPECT_DOUBLE_EQ(r.wer(), 2.0 / 3.0);
  const WerReport d = align_edit(Words{"a"}, Words{}).report;
  EXPECT_EQ(d.deletions, 1);
  EXPECT_EQ(d.wer(), 1.0);
}

TEST(AlignEdit, EmptyReference) {
  const WerReport none = align_edit(Words{}, Words{}).report;
  EXPECT_EQ(none.wer(), 0.0);
  const WerReport ins = align_edit(Words{}, Words{"x"}).report;
  EXPECT_EQ(ins.insertions, 1);
  EXPECT_TRUE(std::isinf(ins.wer()));
  EXPECT_EQ(ins.displayed(), "∞");
}

TEST(AlignEdit, OpsReconstructBothSides) {
  const std::vector<int> ref = {1, 2, 3, 4, 2}, hyp = {2, 3, 5, 4, 4, 2};
  const Alignment a = align_edit(ref, hyp);
  std::vector<int> r, h;
  for (const auto& op : a.ops) {
    if (op.ref_index >= 0) r.push_back(ref[op.ref_index]);
    if (op.hyp_index >= 0) h.push_back(hyp[op.hyp_index]);
    if (op.op == EditOp::kMatch) {
      EXPECT_EQ(ref[op.ref_index], hyp[op.hyp_index]);
    }
  }
  EXPECT_EQ(r, ref);
  EXPECT_EQ(h, hyp);
}

TEST(CorpusWer, PoolsCountsNotRatios) {
  WerReport a;
  a.n_ref = 3;
  a.substitutions = 2;
  WerReport b;
  b.n_ref = 7;
  EXPECT_DOUBLE_EQ(pool_reports({a, b}).wer(), 0.2);
  EXPECT_DOUBLE_EQ(pool_reports({a, b, a, b}).wer(), 0.2);
  const std::vector<std::pair<Words, Words>> pairs = {{{"a", "b"}, {"a"}}, {{"c"}, {"c"}}};
  EXPECT_DOUBLE_EQ(corpus_wer(pairs).wer(), 1.0 / 3.0);
}

TEST(FormatWer, DisplayRule) {
  EXPECT_EQ(format_wer(0.355), "35.5");
  EXPECT_EQ(format_wer(0.026), "2.6");
  EXPECT_EQ(format_wer(1.0), "100.0");
  EXPECT_EQ(format_wer(1.05), "∞");
  EXPECT_EQ(format_wer(1.7), "∞");
  EXPECT_EQ(format_wer(std::numeric_limits<double>::infinity()), "∞");
}

WerReport report_with(int n_ref, int subs) {
  WerReport r;
  r.n_ref = n_ref;
  r.substitutions = subs;
  return r;
}

TEST(CrossDomain, Cells) {
  RunMatrix runs;
  runs[{"ls", "ls"}] = report_with(1000, 26);
  const CrossDomainTable one = cross_domain_matrix(runs);
  ASSERT_EQ(one.cells.size(), 1u);
  EXPECT_EQ(one.cells[0][0], "2.6");
  EXPECT_TRUE(one.in_domain[0][0]);
  runs[{"ls", "ch"}] = report_with(10, 17);
  runs[{"ch", "ch"}] = report_with(1000, 355);
  try {
    cross_domain_matrix(runs, {"ls", "ch"}, {"ls", "ch"});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("(ch, ls)"), std::string::npos);
  }
  runs[{"ch", "ls"}] = report_with(10, 1);
  const CrossDomainTable t = cross_domain_matrix(runs, {"ls", "ch"}, {"ls", "ch"});
  EXPECT_EQ(t.cells[0][1], "∞");
  EXPECT_EQ(t.cells[1][1], "35.5");
  EXPECT_NE(t.to_text().find("35.5*"), std::string::npos);
}

// Transcribes frames by reading token ids from column 0 of each row.
class EchoSystem final : public AsrSystem {
 public:
  EchoSystem() : vocab_(Vocabulary::synthetic(16)) {}
  Output transcribe(const FrameSequence& f) const override {
    Output o;
    for (Eigen::Index t = 0; t < f.n_frames(); ++t) o.tokens.push_back(static_cast<TokenId>(std::lround(f.frames(t, 0))));
    return o;
  }
  const Vocabulary& vocab() const override { return vocab_; }

 private:
  Vocabulary vocab_;
};

std::vector<EvalItem> echo_items() {
  std::vector<EvalItem> items;
  for (int i = 0; i < 4; ++i) {
    EvalItem it;
    it.id = "u" + std::to_string(i);
    FrameSequence f;
    f.frames = Matrix::Zero(2 + i, 1);
    for (int t = 0; t < 2 + i; ++t) f.frames(t, 0) = 9 + t;
    it.frames = f;
    it.reference = "w09 w10";
    items.push_back(it);
  }
  return items;
}

TEST(Sweep, IdentityConditionReproducesEvaluation) {
  const EchoSystem sys;
  const auto items = echo_items();
  EvalOptions opt;
  const auto base = evaluate(sys, items, opt);
  const SweepCurve c = run_sweep(sys, items, {PerturbCondition::tempo(1.0)}, opt);
  ASSERT_EQ(c.records.size(), base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(c.records[i].hypothesis, base[i].hypothesis);
    EXPECT_EQ(c.records[i].report.errors(), base[i].report.errors());
    EXPECT_EQ(c.records[i].duration_s, base[i].duration_s);
  }
  EXPECT_EQ(base[0].report.errors(), 0);
  EXPECT_EQ(base[3].report.insertions, 3);
}

TEST(Sweep, GridSizesAndDurations) {
  const EchoSystem sys;
  const auto items = echo_items();
  EvalOptions opt;
  opt.workers = 2;
  const SweepCurve tempo = run_sweep(sys, items, make_grid(PerturbKind::kTempo), opt);
  EXPECT_EQ(tempo.aggregates.size(), 11u);
  EXPECT_EQ(tempo.utterances_per_condition(), 4u);
  const SweepCurve noise = run_sweep(sys, items, make_grid(PerturbKind::kNoise), opt);
  EXPECT_EQ(noise.aggregates.size(), 7u);
  const ScatterFit half = duration_scatter(tempo, tempo.conditions[0].label());
  const ScatterFit unit = duration_scatter(tempo, tempo.conditions[5].label());
  for (std::size_t i = 0; i < half.points.size(); ++i) {
    EXPECT_DOUBLE_EQ(half.points[i].first, 2 * unit.points[i].first);
  }
  EXPECT_ANY_THROW(duration_scatter(tempo, "tempo=9"));
}

TEST(Sweep, RunawayFlag) {
  const EchoSystem sys;
  auto items = echo_items();
  items[3].reference = "w09";
  EvalOptions opt;
  opt.runaway_factor = 4.0;
  EXPECT_TRUE(evaluate(sys, items, opt)[3].runaway);
  EXPECT_FALSE(evaluate(sys, items, opt)[0].runaway);
}

TEST(Scatter, Fits) {
  const ScatterFit line = fit_scatter({{1, 0.1}, {2, 0.2}, {3, 0.3}});
  EXPECT_NEAR(line.slope, 0.1, 1e-12);
  EXPECT_NEAR(line.correlation, 1.0, 1e-12);
  EXPECT_FALSE(line.degenerate);
  const ScatterFit flat = fit_scatter({{1, 0.2}, {2, 0.2}, {3, 0.2}});
  EXPECT_EQ(flat.slope, 0.0);
  EXPECT_EQ(flat.correlation, 0.0);
  EXPECT_TRUE(flat.degenerate);
  EXPECT_THROW(fit_scatter({{1, 0.1}}), PreconditionError);
}

TEST(Csv, Formats) {
  EXPECT_EQ(csv_number(0.5), "0.500000");
  EXPECT_EQ(csv_number(std::numeric_limits<double>::infinity()), "inf");
  const EchoSystem sys;
  EvalOptions opt;
  std::ostringstream os;
  write_utterance_csv(os, evaluate(sys, echo_items(), opt));
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')).find("utterance_id"), 0u);
}

}  // namespace
}  // namespace slamkit
