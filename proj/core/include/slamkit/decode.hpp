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

#include <limits>

#include "slamkit/linalg.hpp"
#include "slamkit/lora.hpp"
#include "slamkit/transformer.hpp"

namespace slamkit {

inline constexpr int kDefaultBeamWidth = 4;

// Source of next-token log-probabilities for the decoders.
class NextTokenScorer {
 public:
  virtual ~NextTokenScorer() = default;
  virtual int vocab_size() const = 0;
  virtual TokenId eos() const = 0;
  virtual Vector next_log_probs(const TokenSequence& generated) const = 0;
  // Upper bound on the number of tokens that can be generated.
  virtual int capacity() const { return std::numeric_limits<int>::max(); }
};

// Scores continuations of a fixed embedding prefix with the toy LM.
class LmScorer final : public NextTokenScorer {
 public:
  LmScorer(const ToyLM& lm, Matrix prefix, const LoraSet* lora = nullptr);

  int vocab_size() const override { return lm_.config().vocab_size; }
  TokenId eos() const override { return lm_.vocab().eos(); }
  Vector next_log_probs(const TokenSequence& generated) const override;
  int capacity() const override;

 private:
  const ToyLM& lm_;
  Matrix prefix_;
  const LoraSet* lora_;
};

struct Hypothesis {
  TokenSequence tokens;  // eos excluded
  double log_prob = 0.0;
  bool finished = false;   // ended with eos
  bool truncated = false;  // hit max_len (or LM capacity) without eos

  // Log-probability per generated position, eos included.
  double score() const;
};

// Appends the argmax token until eos or max_len; ties go to the smaller id.
Hypothesis decode_greedy(const NextTokenScorer& scorer, int max_len);

// Length-normalized beam search. Hypotheses that emit eos leave the beam,
// which therefore shrinks; beam_width 1 reduces to greedy decoding. The
// greedy hypothesis is part of the final comparison, so the result never
// scores below it.
Hypothesis decode_beam(const NextTokenScorer& scorer, int beam_width, int max_len);

struct DecodeConfig {
  int beam_width = kDefaultBeamWidth;
  int max_len = 64;
};

Hypothesis decode(const NextTokenScorer& scorer, const DecodeConfig& config);

}  // namespace slamkit
