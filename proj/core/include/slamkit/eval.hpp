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

#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slamkit/audio.hpp"
#include "slamkit/ctc.hpp"
#include "slamkit/decode.hpp"
#include "slamkit/features.hpp"
#include "slamkit/lora.hpp"
#include "slamkit/perturb.hpp"
#include "slamkit/projector.hpp"
#include "slamkit/prompt.hpp"
#include "slamkit/transformer.hpp"

namespace slamkit {

// Lowercase, map everything outside [a-z0-9' ] to a space, split on runs.
std::vector<std::string> normalize_text(std::string_view s);

struct WerReport {
  int n_ref = 0;
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;

  int errors() const { return substitutions + deletions + insertions; }
  // (S + D + I) / n_ref; +inf for an empty reference with a nonempty hypothesis.
  double wer() const;
  // Percentage with one decimal, or "∞" when wer > 1.
  std::string displayed() const;
};

// One-decimal percentage of `wer`, "∞" above 100%.
std::string format_wer(double wer);

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

struct AlignedPair {
  EditOp op;
  int ref_index;  // -1 for insertions
  int hyp_index;  // -1 for deletions
};

struct Alignment {
  std::vector<AlignedPair> ops;
  WerReport report;
};

// Unit-cost Levenshtein alignment. The traceback prefers, among optimal
// moves, a diagonal step (match or substitution), then a deletion, then an
// insertion.
template <typename T>
Alignment align_edit(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<int> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& { return cost[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }
  Alignment a;
  a.report.n_ref = static_cast<int>(n);
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        a.ops.push_back({same ? EditOp::kMatch : EditOp::kSubstitute, static_cast<int>(i - 1),
                         static_cast<int>(j - 1)});
        if (!same) ++a.report.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      a.ops.push_back({EditOp::kDelete, static_cast<int>(i - 1), -1});
      ++a.report.deletions;
      --i;
    } else {
      a.ops.push_back({EditOp::kInsert, -1, static_cast<int>(j - 1)});
      ++a.report.insertions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

// Pooled counts; an empty list is a precondition error.
WerReport pool_reports(const std::vector<WerReport>& reports);

template <typename T>
WerReport corpus_wer(const std::vector<std::pair<std::vector<T>, std::vector<T>>>& pairs) {
  std::vector<WerReport> r;
  r.reserve(pairs.size());
  for (const auto& [ref, hyp] : pairs) r.push_back(align_edit(ref, hyp).report);
  return pool_reports(r);
}

// ---- Cross-domain table ----------------------------------------------------

struct CrossDomainTable {
  std::vector<std::string> train_tags;  // rows
  std::vector<std::string> eval_tags;   // columns
  std::vector<std::vector<std::string>> cells;
  std::vector<std::vector<bool>> in_domain;

  // Aligned plain text; in-domain cells are marked with '*'.
  std::string to_text() const;
};

using RunMatrix = std::map<std::pair<std::string, std::string>, WerReport>;

// Rows and columns follow the declared tag order. Missing cells raise a
// ValidationError naming every absent (train, eval) pair.
CrossDomainTable cross_domain_matrix(const RunMatrix& runs,
                                     const std::vector<std::string>& train_tags,
                                     const std::vector<std::string>& eval_tags);
// Tags in first-seen (sorted key) order.
CrossDomainTable cross_domain_matrix(const RunMatrix& runs);

// ---- Systems under test ----------------------------------------------------

class AsrSystem {
 public:
  virtual ~AsrSystem() = default;
  struct Output {
    TokenSequence tokens;
    bool truncated = false;
  };
  virtual Output transcribe(const FrameSequence& frames) const = 0;
  virtual const Vocabulary& vocab() const = 0;
};

// frontend frames -> stack k -> projector -> prompt -> frozen LM decode.
class ConnectorSystem final : public AsrSystem {
 public:
  ConnectorSystem(const ToyLM& lm, const Projector& projector, int k, const LoraSet* lora,
                  PromptLayout layout = {}, DecodeConfig decode = {});
  Output transcribe(const FrameSequence& frames) const override;
  const Vocabulary& vocab() const override { return lm_.vocab(); }

 private:
  const ToyLM& lm_;
  const Projector& projector_;
  int k_;
  const LoraSet* lora_;
  PromptLayout layout_;
  DecodeConfig decode_;
};

// frames -> linear head -> greedy CTC collapse.
class CtcSystem final : public AsrSystem {
 public:
  CtcSystem(const CtcHead& head, const Vocabulary& vocab) : head_(head), vocab_(vocab) {}
  Output transcribe(const FrameSequence& frames) const override;
  const Vocabulary& vocab() const override { return vocab_; }

 private:
  const CtcHead& head_;
  const Vocabulary& vocab_;
};

// ---- Sweeps ----------------------------------------------------------------

// One evaluation item: audio or precomputed frames, plus the reference text.
struct EvalItem {
  std::string id;
  std::optional<Waveform> audio;
  std::optional<FrameSequence> frames;
  std::string reference;
};

struct NoiseBank {
  // Noise waveform per class; missing classes fall back to seeded pink noise.
  std::map<NoiseClass, Waveform> sources;
};

struct UtteranceResult {
  std::string id;
  std::string condition;
  double duration_s = 0.0;
  WerReport report;
  bool runaway = false;
  TokenSequence hypothesis;
};

struct SweepCurve {
  std::vector<PerturbCondition> conditions;
  std::vector<WerReport> aggregates;      // one per condition
  std::vector<int> runaway_counts;        // one per condition
  std::vector<UtteranceResult> records;   // condition-major, item order within

  std::size_t utterances_per_condition() const {
    return conditions.empty() ? 0 : records.size() / conditions.size();
  }
};

struct EvalOptions {
  LogMelConfig frontend;
  NoiseBank noise;
  int workers = 1;
  // Hypotheses longer than this multiple of the reference are runaways.
  double runaway_factor = 4.0;
};

// One condition applied to a single utterance. Noise offsets are seeded by
// (condition seed, utterance id); a missing noise class falls back to seeded
// pink noise of the signal's length.
Waveform perturb_waveform(const Waveform& w, const std::string& id, const PerturbCondition& cond,
                          const NoiseBank& noise);
FrameSequence perturb_frames(const FrameSequence& f, const std::string& id,
                             const PerturbCondition& cond);

// Applies a condition to an item: audio through WSOLA / noise mixing and
// the frontend, frames through the frame-domain analogues. Noise offsets
// come from the (condition seed, utterance id) substream.
FrameSequence perturb_item(const EvalItem& item, const PerturbCondition& cond,
                           const EvalOptions& options, double* duration_s);

// Unperturbed evaluation.
std::vector<UtteranceResult> evaluate(const AsrSystem& system, const std::vector<EvalItem>& items,
                                      const EvalOptions& options);

SweepCurve run_sweep(const AsrSystem& system, const std::vector<EvalItem>& items,
                     const std::vector<PerturbCondition>& grid, const EvalOptions& options);

struct ScatterFit {
  std::vector<std::pair<double, double>> points;  // (duration_s, wer)
  double slope = 0.0;
  double correlation = 0.0;
  bool degenerate = false;  // zero variance: correlation reported as 0
};

ScatterFit duration_scatter(const SweepCurve& curve, const std::string& condition_label);
ScatterFit fit_scatter(std::vector<std::pair<double, double>> points);

// CSV serializations.
void write_utterance_csv(std::ostream& os, const std::vector<UtteranceResult>& records);
void write_aggregate_csv(std::ostream& os, const SweepCurve& curve);
void write_scatter_csv(std::ostream& os, const ScatterFit& fit);

// Fixed-format number used in every CSV: "inf" for +inf, else %.6f.
std::string csv_number(double v);

}  // namespace slamkit
