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

#include "slamkit/decode.hpp"

#include <algorithm>

#include "slamkit/error.hpp"

namespace slamkit {

namespace {

TokenId argmax(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<TokenId>(best);
}

// Higher score first, then lexicographically smaller tokens.
bool better(const Hypothesis& a, const Hypothesis& b) {
  const double sa = a.score(), sb = b.score();
  if (sa != sb) return sa > sb;
  return a.tokens < b.tokens;
}

}  // namespace

LmScorer::LmScorer(const ToyLM& lm, Matrix prefix, const LoraSet* lora)
    : lm_(lm), prefix_(std::move(prefix)), lora_(lora) {}

Vector LmScorer::next_log_probs(const TokenSequence& generated) const {
  Matrix inputs(prefix_.rows() + static_cast<Eigen::Index>(generated.size()), lm_.d_model());
  inputs.topRows(prefix_.rows()) = prefix_;
  if (!generated.empty()) inputs.bottomRows(generated.size()) = lm_.embed(generated);
  const Matrix logits = lm_forward(lm_, inputs, lora_);
  return log_softmax(logits.row(logits.rows() - 1));
}

int LmScorer::capacity() const {
  // The next-token distribution after g generated tokens needs g + prefix rows.
  return std::max(0, lm_.config().max_seq_len - static_cast<int>(prefix_.rows()) + 1);
}

double Hypothesis::score() const {
  const auto length = static_cast<double>(tokens.size() + (finished ? 1 : 0));
  return length > 0 ? log_prob / length : 0.0;
}

Hypothesis decode_greedy(const NextTokenScorer& scorer, int max_len) {
  require(max_len >= 1, "decode max_len must be >= 1");
  const int limit = std::min(max_len, scorer.capacity());
  Hypothesis h;
  for (int step = 0; step < limit; ++step) {
    const Vector lp = scorer.next_log_probs(h.tokens);
    const TokenId best = argmax(lp);
    h.log_prob += lp[best];
    if (best == scorer.eos()) {
      h.finished = true;
      return h;
    }
    h.tokens.push_back(best);
  }
  h.truncated = true;
  return h;
}

Hypothesis decode_beam(const NextTokenScorer& scorer, int beam_width, int max_len) {
  require(beam_width >= 1, "beam_width must be >= 1");
  require(max_len >= 1, "decode max_len must be >= 1");
  const int limit = std::min(max_len, scorer.capacity());
  const TokenId eos = scorer.eos();

  struct Candidate {
    std::size_t parent;
    TokenId token;
    double log_prob;
  };

  std::vector<Hypothesis> alive(1);
  std::vector<Hypothesis> done;
  int width = beam_width;
  for (int step = 0; step < limit && !alive.empty(); ++step) {
    std::vector<Candidate> cands;
    cands.reserve(alive.size() * scorer.vocab_size());
    for (std::size_t i = 0; i < alive.size(); ++i) {
      const Vector lp = scorer.next_log_probs(alive[i].tokens);
      for (Eigen::Index v = 0; v < lp.size(); ++v) {
        cands.push_back({i, static_cast<TokenId>(v), alive[i].log_prob + lp[v]});
      }
    }
    // Ties resolve by parent rank, then token id; alive stays in rank order.
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
      if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
      if (a.parent != b.parent) return a.parent < b.parent;
      return a.token < b.token;
    });
    std::vector<Hypothesis> next;
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(width), cands.size());
    for (std::size_t r = 0; r < keep; ++r) {
      const Candidate& c = cands[r];
      Hypothesis h = alive[c.parent];
      h.log_prob = c.log_prob;
      if (c.token == eos) {
        h.finished = true;
        done.push_back(std::move(h));
        --width;
      } else {
        h.tokens.push_back(c.token);
        next.push_back(std::move(h));
      }
    }
    alive = std::move(next);
  }
  for (auto& h : alive) {
    h.truncated = true;
    done.push_back(std::move(h));
  }

  Hypothesis best = decode_greedy(scorer, max_len);
  for (const auto& h : done) {
    if (better(h, best)) best = h;
  }
  return best;
}

Hypothesis decode(const NextTokenScorer& scorer, const DecodeConfig& config) {
  if (config.beam_width == 1) return decode_greedy(scorer, config.max_len);
  return decode_beam(scorer, config.beam_width, config.max_len);
}

}  // namespace slamkit
