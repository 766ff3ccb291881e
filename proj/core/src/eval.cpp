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

#include "slamkit/eval.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "slamkit/error.hpp"
#include "slamkit/parallel.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

std::vector<std::string> normalize_text(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char raw : s) {
    const auto c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '\'';
    if (keep) {
      cur += c;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double WerReport::wer() const {
  if (n_ref == 0) {
    return errors() == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(errors()) / n_ref;
}

std::string WerReport::displayed() const { return format_wer(wer()); }

std::string format_wer(double wer) {
  if (wer > 1.0) return "∞";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * wer);
  return buf;
}

WerReport pool_reports(const std::vector<WerReport>& reports) {
  require(!reports.empty(), "corpus WER needs at least one pair");
  WerReport total;
  for (const auto& r : reports) {
    total.n_ref += r.n_ref;
    total.substitutions += r.substitutions;
    total.deletions += r.deletions;
    total.insertions += r.insertions;
  }
  return total;
}

// ---- Cross-domain table ----------------------------------------------------

std::string CrossDomainTable::to_text() const {
  std::size_t w0 = std::string("train \\ eval").size();
  for (const auto& t : train_tags) w0 = std::max(w0, t.size());
  // "∞" is three bytes but one column wide.
  auto width = [](const std::string& s) { return s == "∞" ? std::size_t{1} : s.size(); };
  std::vector<std::size_t> w(eval_tags.size());
  for (std::size_t j = 0; j < eval_tags.size(); ++j) {
    w[j] = eval_tags[j].size();
    for (std::size_t i = 0; i < train_tags.size(); ++i) {
      w[j] = std::max(w[j], width(cells[i][j]) + (in_domain[i][j] ? 1 : 0));
    }
  }
  std::ostringstream os;
  auto pad = [&](const std::string& s, std::size_t n, bool right) {
    const std::size_t k = width(s);
    const std::string fill(n > k ? n - k : 0, ' ');
    os << (right ? fill + s : s + fill);
  };
  pad("train \\ eval", w0, false);
  for (std::size_t j = 0; j < eval_tags.size(); ++j) {
    os << "  ";
    pad(eval_tags[j], w[j], true);
  }
  os << '\n';
  for (std::size_t i = 0; i < train_tags.size(); ++i) {
    pad(train_tags[i], w0, false);
    for (std::size_t j = 0; j < eval_tags.size(); ++j) {
      os << "  ";
      pad(cells[i][j] + (in_domain[i][j] ? "*" : ""), w[j], true);
    }
    os << '\n';
  }
  return os.str();
}

CrossDomainTable cross_domain_matrix(const RunMatrix& runs,
                                     const std::vector<std::string>& train_tags,
                                     const std::vector<std::string>& eval_tags) {
  require(!train_tags.empty() && !eval_tags.empty(), "cross-domain matrix needs declared tags");
  std::vector<std::string> missing;
  for (const auto& tr : train_tags) {
    for (const auto& ev : eval_tags) {
      if (!runs.count({tr, ev})) missing.push_back("(" + tr + ", " + ev + ")");
    }
  }
  if (!missing.empty()) {
    std::string msg = "incomplete cross-domain matrix; missing";
    for (const auto& m : missing) msg += " " + m;
    throw ValidationError(msg);
  }
  CrossDomainTable t;
  t.train_tags = train_tags;
  t.eval_tags = eval_tags;
  for (const auto& tr : train_tags) {
    std::vector<std::string> row;
    std::vector<bool> diag;
    for (const auto& ev : eval_tags) {
      row.push_back(runs.at({tr, ev}).displayed());
      diag.push_back(tr == ev);
    }
    t.cells.push_back(std::move(row));
    t.in_domain.push_back(std::move(diag));
  }
  return t;
}

CrossDomainTable cross_domain_matrix(const RunMatrix& runs) {
  std::vector<std::string> rows, cols;
  std::set<std::string> seen_r, seen_c;
  for (const auto& [key, _] : runs) {
    if (seen_r.insert(key.first).second) rows.push_back(key.first);
    if (seen_c.insert(key.second).second) cols.push_back(key.second);
  }
  std::sort(cols.begin(), cols.end());
  return cross_domain_matrix(runs, rows, cols);
}

// ---- Systems ---------------------------------------------------------------

ConnectorSystem::ConnectorSystem(const ToyLM& lm, const Projector& projector, int k,
                                 const LoraSet* lora, PromptLayout layout, DecodeConfig decode)
    : lm_(lm), projector_(projector), k_(k), lora_(lora), layout_(std::move(layout)),
      decode_(decode) {
  require(k >= 1, "stacking factor k must be >= 1");
  require(projector.d_out() == lm.d_model(), "projector output width does not match the LM");
}

AsrSystem::Output ConnectorSystem::transcribe(const FrameSequence& frames) const {
  const DownsampledFeatures z = downsample_stack(frames, k_);
  const Matrix speech = projector_forward(projector_, z.features);
  const AssembledPrompt p = assemble_prompt(layout_, speech, lm_);
  LmScorer scorer(lm_, p.inputs, lora_);
  const Hypothesis h = decode(scorer, decode_);
  return {h.tokens, h.truncated};
}

AsrSystem::Output CtcSystem::transcribe(const FrameSequence& frames) const {
  if (frames.n_frames() == 0) return {};
  return {ctc_greedy_decode(ctc_head_log_probs(head_, frames.frames)), false};
}

// ---- Sweeps ----------------------------------------------------------------

Waveform perturb_waveform(const Waveform& w, const std::string& id, const PerturbCondition& cond,
                          const NoiseBank& noise) {
  if (cond.kind() == PerturbKind::kTempo) return time_scale(w, cond.ratio());
  const std::uint64_t utt_seed = substream_seed(cond.seed(), id);
  const auto it = noise.sources.find(cond.noise_class());
  const Waveform source = it != noise.sources.end()
                              ? it->second
                              : pink_noise(std::max<std::size_t>(w.frame_count(), 1),
                                           w.sample_rate(), substream_seed(utt_seed, "pink"));
  return mix_noise(w, source, cond.snr_db(), utt_seed);
}

FrameSequence perturb_frames(const FrameSequence& f, const std::string& id,
                             const PerturbCondition& cond) {
  if (cond.kind() == PerturbKind::kTempo) return time_scale_frames(f, cond.ratio());
  return mix_noise_frames(f, cond.snr_db(), substream_seed(cond.seed(), id));
}

FrameSequence perturb_item(const EvalItem& item, const PerturbCondition& cond,
                           const EvalOptions& options, double* duration_s) {
  require(item.audio.has_value() != item.frames.has_value(),
          "evaluation item " + item.id + " must carry exactly one of audio or frames");
  if (item.audio) {
    const Waveform w = perturb_waveform(*item.audio, item.id, cond, options.noise);
    if (duration_s != nullptr) *duration_s = w.duration_seconds();
    return logmel_frontend(w, options.frontend);
  }
  FrameSequence f = perturb_frames(*item.frames, item.id, cond);
  if (duration_s != nullptr) *duration_s = f.duration_seconds();
  return f;
}

namespace {

UtteranceResult score_item(const AsrSystem& system, const EvalItem& item, const FrameSequence& f,
                           double duration_s, const std::string& label, double runaway_factor) {
  const AsrSystem::Output out = system.transcribe(f);
  const std::vector<std::string> ref = normalize_text(item.reference);
  const std::vector<std::string> hyp = normalize_text(system.vocab().decode_text(out.tokens));
  UtteranceResult r;
  r.id = item.id;
  r.condition = label;
  r.duration_s = duration_s;
  r.report = align_edit(ref, hyp).report;
  r.runaway = out.truncated || static_cast<double>(hyp.size()) > runaway_factor * ref.size();
  r.hypothesis = out.tokens;
  return r;
}

}  // namespace

std::vector<UtteranceResult> evaluate(const AsrSystem& system, const std::vector<EvalItem>& items,
                                      const EvalOptions& options) {
  std::vector<UtteranceResult> out(items.size());
  parallel_for(items.size(), options.workers, [&](std::size_t i) {
    const EvalItem& it = items[i];
    require(it.audio.has_value() != it.frames.has_value(),
            "evaluation item " + it.id + " must carry exactly one of audio or frames");
    FrameSequence f;
    double dur = 0.0;
    if (it.audio) {
      f = logmel_frontend(*it.audio, options.frontend);
      dur = it.audio->duration_seconds();
    } else {
      f = *it.frames;
      dur = f.duration_seconds();
    }
    out[i] = score_item(system, it, f, dur, "none", options.runaway_factor);
  });
  return out;
}

SweepCurve run_sweep(const AsrSystem& system, const std::vector<EvalItem>& items,
                     const std::vector<PerturbCondition>& grid, const EvalOptions& options) {
  require(!grid.empty(), "sweep grid is empty");
  require(!items.empty(), "sweep needs at least one utterance");
  SweepCurve curve;
  curve.conditions = grid;
  curve.records.resize(grid.size() * items.size());
  parallel_for(curve.records.size(), options.workers, [&](std::size_t n) {
    const std::size_t c = n / items.size();
    const std::size_t i = n % items.size();
    double dur = 0.0;
    const FrameSequence f = perturb_item(items[i], grid[c], options, &dur);
    curve.records[n] = score_item(system, items[i], f, dur, grid[c].label(), options.runaway_factor);
  });
  for (std::size_t c = 0; c < grid.size(); ++c) {
    std::vector<WerReport> reports;
    int runaways = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& r = curve.records[c * items.size() + i];
      reports.push_back(r.report);
      runaways += r.runaway ? 1 : 0;
    }
    curve.aggregates.push_back(pool_reports(reports));
    curve.runaway_counts.push_back(runaways);
  }
  return curve;
}

ScatterFit fit_scatter(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) {
    throw PreconditionError("duration scatter needs at least 2 points; correlation undefined");
  }
  ScatterFit fit;
  fit.points = std::move(points);
  double mx = 0.0, my = 0.0;
  std::size_t n = 0;
  for (const auto& [x, y] : fit.points) {
    if (!std::isfinite(y)) continue;
    mx += x;
    my += y;
    ++n;
  }
  if (n < 2) {
    fit.degenerate = true;
    return fit;
  }
  mx /= n;
  my /= n;
  // Zero variance is decided exactly; the rounded mean would leave ~1e-33 residue.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double xlo = kInf, xhi = -kInf, ylo = kInf, yhi = -kInf;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [x, y] : fit.points) {
    if (!std::isfinite(y)) continue;
    xlo = std::min(xlo, x);
    xhi = std::max(xhi, x);
    ylo = std::min(ylo, y);
    yhi = std::max(yhi, y);
    sxx += (x - mx) * (x - mx);
    syy += (y - my) * (y - my);
    sxy += (x - mx) * (y - my);
  }
  const bool flat_x = xlo == xhi, flat_y = ylo == yhi;
  fit.slope = flat_x || flat_y ? 0.0 : sxy / sxx;
  if (!flat_x && !flat_y) {
    fit.correlation = sxy / std::sqrt(sxx * syy);
  } else {
    fit.degenerate = true;
  }
  return fit;
}

ScatterFit duration_scatter(const SweepCurve& curve, const std::string& condition_label) {
  std::vector<std::pair<double, double>> pts;
  bool found = false;
  for (const auto& c : curve.conditions) found = found || c.label() == condition_label;
  require(found, "condition " + condition_label + " is not part of the sweep");
  for (const auto& r : curve.records) {
    if (r.condition == condition_label) pts.emplace_back(r.duration_s, r.report.wer());
  }
  return fit_scatter(std::move(pts));
}

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

void write_utterance_csv(std::ostream& os, const std::vector<UtteranceResult>& records) {
  os << "utterance_id,condition,duration_s,n_ref,S,D,I,wer,runaway_flag\n";
  for (const auto& r : records) {
    os << r.id << ',' << r.condition << ',' << csv_number(r.duration_s) << ',' << r.report.n_ref
       << ',' << r.report.substitutions << ',' << r.report.deletions << ',' << r.report.insertions
       << ',' << csv_number(r.report.wer()) << ',' << (r.runaway ? 1 : 0) << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, const SweepCurve& curve) {
  os << "condition,pooled_wer,runaway_count\n";
  for (std::size_t c = 0; c < curve.conditions.size(); ++c) {
    os << curve.conditions[c].label() << ',' << csv_number(curve.aggregates[c].wer()) << ','
       << curve.runaway_counts[c] << '\n';
  }
}

void write_scatter_csv(std::ostream& os, const ScatterFit& fit) {
  os << "duration_s,wer\n";
  for (const auto& [x, y] : fit.points) os << csv_number(x) << ',' << csv_number(y) << '\n';
}

}  // namespace slamkit
