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

#include "slamkit/pipeline.hpp"

#include <cstdio>

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

LmConfig lm_config(const RunConfig& c) {
  LmConfig l = c.lm;
  l.vocab_size = c.vocab.kind == "characters" ? 128 : c.vocab.size;
  return l;
}

CopyCorpus pretrain_corpus(const RunConfig& c, const Vocabulary& vocab) {
  const PretrainSection& p = c.pretrain;
  return make_copy_corpus(vocab.content_tokens(), p.train_size, p.dev_size, p.min_len, p.max_len,
                          substream_seed(c.seed, "pretrain-corpus"));
}

PretrainConfig pretrain_config(const RunConfig& c) {
  PretrainConfig p = c.pretrain.config;
  p.train.seed = substream_seed(c.seed, "pretrain");
  p.train.workers = c.resolved_workers();
  return p;
}

TrainConfig connector_train_config(const RunConfig& c) {
  TrainConfig t = c.train;
  t.seed = substream_seed(c.seed, "connector");
  t.workers = c.resolved_workers();
  return t;
}

TrainConfig ctc_train_config(const RunConfig& c) {
  TrainConfig t = c.train;
  t.seed = substream_seed(c.seed, "ctc");
  t.workers = c.resolved_workers();
  return t;
}

ToyCorpusSpec toy_corpus_spec(const ToyLM& lm, const RunConfig& c) {
  return make_toy_corpus_spec(lm.vocab().content_tokens(), c.corpus.d_enc, lm.d_model(),
                              substream_seed(c.seed, "corpus"));
}

std::vector<ToySample> synth_split(const ToyLM& lm, const ToyCorpusSpec& spec,
                                   const RunConfig& c, const std::string& split, int n,
                                   RateDistribution rate) {
  require(n >= 0, "split size must be non-negative");
  const CorpusSection& cs = c.corpus;
  require(cs.min_len >= 1 && cs.min_len <= cs.max_len, "corpus lengths must satisfy 1 <= min <= max");
  Rng lengths = make_rng(substream_seed(c.seed, "corpus"), "lengths-" + split);
  std::uniform_int_distribution<int> len_dist(cs.min_len, cs.max_len);
  std::vector<ToySample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "%s-%05d", split.c_str(), i);
    const int len = len_dist(lengths);
    const std::uint64_t seed = substream_seed(substream_seed(c.seed, "corpus"), split, i);
    out.push_back({id, synth_utterance(lm.embeddings(), spec, len, rate, cs.noise_sigma, seed)});
  }
  return out;
}

ConnectorExample connector_example(const std::string& id, const FrameSequence& frames,
                                   const TokenSequence& reference, int k) {
  return {id, downsample_stack(frames, k), reference};
}

}  // namespace slamkit
