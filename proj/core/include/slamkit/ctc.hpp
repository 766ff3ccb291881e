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

#include <vector>

#include "slamkit/features.hpp"
#include "slamkit/linalg.hpp"
#include "slamkit/params.hpp"

namespace slamkit {

struct TrainConfig;
struct EpochLog;

inline constexpr TokenId kCtcBlank = 0;

// log_probs is T x C with row-wise log-softmax normalization; column 0 is
// the blank. Labels live in 1..C-1.
struct CtcInstance {
  Matrix log_probs;
  TokenSequence labels;
};

struct CtcResult {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, where log_probs = log_softmax(logits)
};

// Frames needed to emit `labels`: one per label plus a blank between repeats.
int ctc_min_frames(const TokenSequence& labels);

// Negative log-likelihood by the log-space forward-backward recursion.
// Throws InfeasibleError (carrying the minimal T) when T is too short.
CtcResult ctc_loss(const CtcInstance& inst);

// Exhaustive path enumeration; refuses instances with more than 1e7 paths.
double ctc_brute_force(const CtcInstance& inst);

// Per-frame argmax, merge repeats, drop blanks.
TokenSequence ctc_greedy_decode(const Matrix& log_probs);

// Linear CTC head on frozen encoder frames.
struct CtcHead {
  Matrix weight;  // d_enc x C
  Matrix bias;    // 1 x C
  int trained_epochs = 0;

  static CtcHead init(int d_enc, int n_classes, std::uint64_t seed);

  int d_enc() const { return static_cast<int>(weight.rows()); }
  int n_classes() const { return static_cast<int>(weight.cols()); }

  std::vector<ParamRef> params();
  std::vector<ConstParamRef> params() const;
};

Matrix ctc_head_logits(const CtcHead& head, const Matrix& frames);
Matrix ctc_head_log_probs(const CtcHead& head, const Matrix& frames);
Matrix row_log_softmax(const Matrix& logits);

struct CtcExample {
  FrameSequence frames;
  TokenSequence labels;
};

// Loss and head gradients for one utterance (throws InfeasibleError).
double ctc_head_loss(const CtcHead& head, const CtcExample& ex, std::vector<Matrix>* grads);

struct CtcTrainResult {
  CtcHead head;
  int skipped = 0;  // infeasible utterances, counted once per corpus
  std::vector<EpochLog> log;
};

// Trains only the head; frames are inputs and never change. Loss is the
// mean over utterances of each batch.
CtcTrainResult train_ctc_baseline(const std::vector<CtcExample>& train,
                                  const std::vector<CtcExample>& dev, int n_classes,
                                  const TrainConfig& config);

}  // namespace slamkit
