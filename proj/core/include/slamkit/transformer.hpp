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
#include <vector>

#include "slamkit/linalg.hpp"
#include "slamkit/lora.hpp"
#include "slamkit/params.hpp"
#include "slamkit/vocab.hpp"

namespace slamkit {

struct LmConfig {
  int vocab_size = 128;
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int d_ff = 256;
  int max_seq_len = 1024;
};

// Pre-norm block: h += Attn(LN1(h)); h += FFN(LN2(h)). Projection weights are
// stored d_out x d_in and applied to row batches as X W^T.
struct TransformerLayer {
  Matrix ln1_gain, ln1_bias;
  Matrix wq, wk, wv, wo;
  Matrix ln2_gain, ln2_bias;
  Matrix ff_in, ff_in_bias;    // d_ff x d_model, 1 x d_ff
  Matrix ff_out, ff_out_bias;  // d_model x d_ff, 1 x d_model
};

// Parameter blocks of the toy LM. Also used as the gradient container.
struct LmWeights {
  Matrix token_embedding;     // V x d
  Matrix position_embedding;  // max_seq_len x d
  std::vector<TransformerLayer> layers;
  Matrix final_gain, final_bias;
  Matrix head, head_bias;  // V x d, 1 x V

  std::vector<ParamRef> refs();
  std::vector<ConstParamRef> refs() const;
  LmWeights zeros_like() const;
};

// Tiny causal transformer standing in for the frozen LLM. It consumes input
// embedding sequences, so speech tokens and text tokens share one interface.
class ToyLM {
 public:
  ToyLM(const LmConfig& config, Vocabulary vocab, std::uint64_t seed);
  ToyLM(const LmConfig& config, Vocabulary vocab, LmWeights weights);

  const LmConfig& config() const noexcept { return config_; }
  const Vocabulary& vocab() const noexcept { return vocab_; }
  int d_model() const noexcept { return config_.d_model; }

  const LmWeights& weights() const noexcept { return weights_; }
  // Mutable access for training; refused once frozen.
  LmWeights& mutable_weights();

  const Matrix& embeddings() const noexcept { return weights_.token_embedding; }
  Matrix embed(const TokenSequence& tokens) const;

  std::uint64_t checksum() const;
  void freeze();
  bool frozen() const noexcept { return frozen_; }
  std::uint64_t frozen_checksum() const noexcept { return frozen_checksum_; }
  // Throws if a frozen model's parameters no longer match the recorded checksum.
  void verify_frozen() const;

 private:
  LmConfig config_;
  Vocabulary vocab_;
  LmWeights weights_;
  bool frozen_ = false;
  std::uint64_t frozen_checksum_ = 0;
};

struct LayerNormTrace {
  Matrix normalized;
  Vector inv_std;
};

struct LayerTrace {
  Matrix input;
  LayerNormTrace ln1;
  Matrix ln1_out;
  Matrix q, k, v;
  Matrix q_lora, v_lora;  // X A^T when adapters are present
  std::vector<Matrix> probs;
  Matrix attn;
  Matrix mid;
  LayerNormTrace ln2;
  Matrix ln2_out;
  Matrix ff_pre;
  Matrix ff_act;
};

struct LmTrace {
  Matrix inputs;
  std::vector<LayerTrace> layers;
  Matrix final_input;
  LayerNormTrace final_ln;
  Matrix final_out;
};

// Logits (T x V) for an input embedding sequence (T x d).
Matrix lm_forward(const ToyLM& lm, const Matrix& inputs, const LoraSet* lora = nullptr,
                  LmTrace* trace = nullptr);

struct LmGradients {
  LmWeights weights;        // populated only when requested
  Matrix inputs;            // dL/d(input embeddings)
  std::vector<Matrix> lora; // aligned with LoraSet::params()
};

void lm_backward(const ToyLM& lm, const LmTrace& trace, const Matrix& d_logits,
                 const LoraSet* lora, bool want_weight_grads, LmGradients& grads);

// Cross-entropy over rows with targets[t] >= 0, averaged over those rows.
struct MaskedLoss {
  double loss = 0.0;
  int count = 0;
  int correct = 0;
  Matrix d_logits;
};

MaskedLoss masked_cross_entropy(const Matrix& logits, const std::vector<TokenId>& targets);

Vector log_softmax(const Eigen::Ref<const RowVector>& logits);

}  // namespace slamkit
