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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slamkit/features.hpp"
#include "slamkit/linalg.hpp"
#include "slamkit/lora.hpp"
#include "slamkit/params.hpp"
#include "slamkit/projector.hpp"
#include "slamkit/prompt.hpp"
#include "slamkit/random.hpp"
#include "slamkit/transformer.hpp"

namespace slamkit {

enum class Precision { kFp64, kFp32 };

std::string to_string(Precision p);
Precision parse_precision(const std::string& s);

struct TrainConfig {
  double learning_rate = 1e-4;
  int batch_size = 4;
  int max_epochs = 3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Epochs without dev cross-entropy improvement before stopping.
  int patience = 1;
  std::uint64_t seed = 0;
  Precision precision = Precision::kFp64;
  // Per-utterance gradient workers; results do not depend on this.
  int workers = 1;
};

// Throws PreconditionError on out-of-range fields.
void validate(const TrainConfig& config);

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::int64_t step = 0;
};

// One AdamW update: bias-corrected moments, then decoupled decay applied to
// the pre-update weights. In fp32 mode parameters are rounded to float after
// the update. A non-finite gradient aborts with the offending block's name.
void adamw_step(const std::vector<ParamRef>& params, const std::vector<Matrix>& grads,
                AdamState& state, const TrainConfig& config);

// Max relative error between `analytic` and central differences of `loss`
// at `point`. When `coords` is given only those coordinates are probed.
double grad_check(const std::function<double(const Vector&)>& loss, const Vector& point,
                  const Vector& analytic, double step,
                  const std::vector<Eigen::Index>* coords = nullptr);

struct BlockChecksum {
  std::string name;
  std::uint64_t checksum = 0;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_accuracy = 0.0;  // teacher-forced token accuracy
  double wall_seconds = 0.0;
  std::vector<BlockChecksum> checksums;
};

std::vector<BlockChecksum> block_checksums(const std::vector<ConstParamRef>& params);

// One line per epoch: epoch, losses, wall time, then name=hex for each block.
std::string format_run_log(const std::vector<EpochLog>& log);

// Groups example indices into batches of similar length (stable sort by
// length, chunk), then shuffles the batch order with `rng`.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<int>& lengths,
                                                   int batch_size, Rng& rng);

// ---- LM pretraining ------------------------------------------------------

// Transcription copy-task corpus: each item is a reference token sequence;
// the speech part of the prompt is the LM's own embedding of those tokens.
struct CopyCorpus {
  std::vector<TokenSequence> train;
  std::vector<TokenSequence> dev;
};

CopyCorpus make_copy_corpus(const TokenSequence& content_tokens, int train_size, int dev_size,
                            int min_len, int max_len, std::uint64_t seed);

struct PretrainConfig {
  TrainConfig train = defaults();
  double target_accuracy = 0.99;
  double min_accuracy = 0.90;
  // Learning rate decays linearly per step to this fraction of the initial
  // value over max_epochs (1 keeps it constant).
  double final_lr_fraction = 0.05;

  static TrainConfig defaults() {
    TrainConfig c;
    c.learning_rate = 3e-3;
    c.batch_size = 16;
    c.max_epochs = 30;
    return c;
  }
};

struct PretrainResult {
  ToyLM lm;
  std::vector<EpochLog> log;
  double dev_accuracy = 0.0;     // teacher-forced
  double dev_exact_match = 0.0;  // greedy decode equals reference
};

// Trains every LM block on the copy task until the dev teacher-forced
// accuracy reaches the target or epochs run out, then freezes the epoch with
// the best dev accuracy.
// Throws TrainingFailedError below min_accuracy.
PretrainResult pretrain_toy_lm(const LmConfig& lm_config, const Vocabulary& vocab,
                               const CopyCorpus& corpus, const PretrainConfig& config,
                               const PromptLayout& layout = {});

struct CopyLoss {
  double loss = 0.0;
  int count = 0;
  int correct = 0;
};

// Teacher-forced loss of one copy-task item; accumulates weight gradients
// (token-embedding rows of the speech part included) when `grads` is set.
CopyLoss copy_task_loss(const ToyLM& lm, const TokenSequence& tokens, const PromptLayout& layout,
                        LmWeights* grads);

// Fraction of items whose greedy decode of the oracle prompt equals the item.
double oracle_exact_match(const ToyLM& lm, const std::vector<TokenSequence>& items,
                          const PromptLayout& layout, int workers = 1);

// ---- Connector training --------------------------------------------------

struct ConnectorExample {
  std::string id;
  DownsampledFeatures z;
  TokenSequence reference;
};

struct LoraOptions {
  int rank = 8;
  double alpha = 16.0;
};

struct ConnectorOptions {
  int hidden = 2048;
  std::optional<LoraOptions> lora;
  PromptLayout layout;
  // When set, the latest finite-loss state is written here after each epoch.
  std::string last_good_path;
};

struct ConnectorLoss {
  double loss = 0.0;
  int count = 0;
  int correct = 0;
  std::vector<Matrix> projector_grads;  // aligned with Projector::params()
  std::vector<Matrix> lora_grads;       // aligned with LoraSet::params()
};

// Teacher-forced cross-entropy over the transcript-and-eos positions.
ConnectorLoss connector_loss(const ToyLM& lm, const Projector& projector, const LoraSet* lora,
                             const ConnectorExample& ex, const PromptLayout& layout,
                             bool want_grads);

struct ConnectorResult {
  Projector projector;
  std::optional<LoraSet> lora;
  std::vector<EpochLog> log;
  int best_epoch = 0;  // 0: the initialization
};

// Optimizes only the projector (and adapters when requested) against a
// frozen LM; returns the state with the lowest dev cross-entropy.
ConnectorResult train_projector(const ToyLM& lm, const std::vector<ConnectorExample>& train,
                                const std::vector<ConnectorExample>& dev,
                                const TrainConfig& config, const ConnectorOptions& options);

}  // namespace slamkit
