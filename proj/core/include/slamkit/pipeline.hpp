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

#include "slamkit/ctc.hpp"
#include "slamkit/features.hpp"
#include "slamkit/run_config.hpp"
#include "slamkit/train.hpp"

namespace slamkit {

// Glue shared by the command-line tool and the end-to-end checks: every
// corpus, seed, and training config of a run is derived from its RunConfig.

// LM shape with the vocabulary size taken from the vocab section.
LmConfig lm_config(const RunConfig& c);

// Copy-task corpus for pretraining, drawn from the "pretrain-corpus" substream.
CopyCorpus pretrain_corpus(const RunConfig& c, const Vocabulary& vocab);

// Pretraining and connector/CTC optimizer settings with run seeds and the
// resolved worker count filled in.
PretrainConfig pretrain_config(const RunConfig& c);
TrainConfig connector_train_config(const RunConfig& c);
TrainConfig ctc_train_config(const RunConfig& c);

// Emission map from LM embeddings to encoder frames.
ToyCorpusSpec toy_corpus_spec(const ToyLM& lm, const RunConfig& c);

struct ToySample {
  std::string id;
  ToyUtterance utterance;
};

// `n` synthetic utterances of a named split ("train", "dev", "test", ...).
// Lengths are uniform in [corpus.min_len, corpus.max_len]; the split name
// selects the substream, so a split's tokens do not depend on `rate`.
std::vector<ToySample> synth_split(const ToyLM& lm, const ToyCorpusSpec& spec,
                                   const RunConfig& c, const std::string& split, int n,
                                   RateDistribution rate);

ConnectorExample connector_example(const std::string& id, const FrameSequence& frames,
                                   const TokenSequence& reference, int k);

}  // namespace slamkit
