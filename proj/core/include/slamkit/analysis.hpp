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

#include "slamkit/decode.hpp"
#include "slamkit/features.hpp"
#include "slamkit/linalg.hpp"
#include "slamkit/lora.hpp"
#include "slamkit/projector.hpp"
#include "slamkit/prompt.hpp"
#include "slamkit/transformer.hpp"

namespace slamkit {

// Pairwise cosine similarities, speech tokens (rows) against text tokens
// (columns). Rows or columns with zero norm hold 0 and are flagged.
struct AlignmentMap {
  Matrix values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<bool> zero_rows;
  std::vector<bool> zero_cols;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  bool empty() const { return values.size() == 0; }
};

AlignmentMap cosine_matrix(const SpeechTokenEmbeddings& speech, const Matrix& text);
AlignmentMap cosine_matrix(const SpeechTokenEmbeddings& speech, const Matrix& text,
                           std::vector<std::string> col_labels);

// Column-wise argmax over speech positions. Exact ties go to the row nearest
// the column's diagonal position j*(rows-1)/(cols-1), then the earlier row.
std::vector<int> column_argmax(const AlignmentMap& map);

enum class Metric { kCosine, kEuclidean };

struct NearestToken {
  TokenId token = 0;
  double score = 0.0;    // cosine similarity, or euclidean distance
  bool flagged = false;  // zero-norm speech token under the cosine metric
};

// Closest input-embedding row of the LM for each speech token; ties go to
// the smaller token id.
std::vector<NearestToken> nearest_tokens(const SpeechTokenEmbeddings& speech, const ToyLM& lm,
                                         Metric metric = Metric::kCosine);
std::vector<NearestToken> nearest_tokens(const SpeechTokenEmbeddings& speech, const Matrix& table,
                                         Metric metric = Metric::kCosine);

// Linear map of [-1, 1] onto the 256 colormap entries: -1 -> 0, 0 -> 128, 1 -> 255.
int colormap_index(double value);

// Binary PPM (P6) with `cell` x `cell` pixels per entry, row-major.
std::vector<std::uint8_t> heatmap_ppm(const AlignmentMap& map, int cell = 1);
// SVG with one rect per entry and axis labels.
std::string heatmap_svg(const AlignmentMap& map, int cell = 16);
void export_heatmap(const AlignmentMap& map, const std::string& path, int cell = 0);

std::string map_csv(const AlignmentMap& map);

struct AlignmentBundle {
  AlignmentMap map;
  TokenSequence reference;
  std::vector<NearestToken> nearest;
  TokenSequence decoded;

  bool empty() const { return map.empty() && reference.empty() && decoded.empty(); }
  // Three lines: reference, nearest-token probe, decoded hypothesis.
  std::string tokens_text(const Vocabulary& vocab) const;
};

struct AlignmentOptions {
  PromptLayout layout;
  DecodeConfig decode;
  // Oracle probes use the (never trained) identity projector.
  bool allow_untrained = false;
};

// Runs the connector on `frames` and compares the speech tokens with the
// input embeddings of the reference tokens.
AlignmentBundle alignment_report(const ToyLM& lm, const Projector& projector, int k,
                                 const LoraSet* lora, const FrameSequence& frames,
                                 const TokenSequence& reference,
                                 const AlignmentOptions& options = {});

// Writes map.csv, map.svg and tokens.txt into `dir` (created if needed).
void write_alignment_bundle(const std::string& dir, const AlignmentBundle& bundle,
                            const Vocabulary& vocab);

}  // namespace slamkit
