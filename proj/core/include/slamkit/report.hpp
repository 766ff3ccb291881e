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

#include <string>
#include <vector>

#include "slamkit/eval.hpp"

namespace slamkit {

// Result directories are recognized by a marker file written next to the
// eval CSVs: eval.json {"system", "train_tag", "eval_tag"} or sweep.json
// {"system", "kind"}.
inline constexpr const char* kEvalMarker = "eval.json";
inline constexpr const char* kSweepMarker = "sweep.json";

void write_eval_marker(const std::string& dir, const std::string& system,
                       const std::string& train_tag, const std::string& eval_tag);
void write_sweep_marker(const std::string& dir, const std::string& system, PerturbKind kind);

struct ReportOutput {
  std::string text;                   // matrix plus sweep tables
  std::vector<std::string> files;     // written paths, sorted
  std::vector<std::string> notices;   // e.g. a missing baseline series
};

// Scans `results_dir` recursively and writes report.txt, curve_<kind>.csv
// and wer_vs_ratio.svg / wer_vs_snr.svg into `out_dir`. Throws
// ValidationError when nothing is found.
ReportOutput render_report(const std::string& results_dir, const std::string& out_dir);

// Pooled report from a per-utterance CSV.
WerReport pooled_from_utterance_csv(const std::string& path);

struct ChartSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;  // WER fraction; +inf is drawn at the clip line
};

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::vector<ChartSeries>& series);

}  // namespace slamkit
