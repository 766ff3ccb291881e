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

#include "slamkit/prompt.hpp"

#include "slamkit/error.hpp"

namespace slamkit {

std::string PromptLayout::render() const {
  return "<s>" + user_marker + " " + instruction + " " + assistant_marker;
}

TokenSequence PromptLayout::template_tokens(const Vocabulary& vocab) const {
  const std::string text = render();
  if (text == kPromptTemplate) return vocab.template_tokens();
  if (vocab.kind() != VocabKind::kCharacters) {
    throw ValidationError("custom prompt layouts require the character vocabulary");
  }
  TokenSequence ids = {vocab.bos()};
  const TokenSequence rest = vocab.encode_text(std::string_view(text).substr(3));
  ids.insert(ids.end(), rest.begin(), rest.end());
  return ids;
}

std::vector<TokenId> AssembledPrompt::next_token_targets() const {
  std::vector<TokenId> targets(input_ids.size(), -1);
  for (std::size_t t = 0; t + 1 < input_ids.size(); ++t) {
    if (target_mask[t + 1] != 0) targets[t] = input_ids[t + 1];
  }
  return targets;
}

AssembledPrompt assemble_prompt(const PromptLayout& layout, const Matrix& speech,
                                const ToyLM& lm, const std::optional<TokenSequence>& transcript) {
  require(speech.rows() == 0 || speech.cols() == lm.d_model(),
          "speech embedding width does not match the LM embedding dimension");
  const Vocabulary& vocab = lm.vocab();
  TokenSequence text = layout.template_tokens(vocab);
  AssembledPrompt p;
  p.n_speech = static_cast<int>(speech.rows());
  p.template_length = static_cast<int>(text.size());
  if (transcript.has_value()) {
    for (TokenId id : *transcript) {
      require(vocab.contains(id), "transcript token id " + std::to_string(id) +
                                      " outside the vocabulary");
    }
    text.insert(text.end(), transcript->begin(), transcript->end());
    text.push_back(vocab.eos());
  }

  const Matrix text_emb = lm.embed(text);
  p.inputs.resize(speech.rows() + text_emb.rows(), lm.d_model());
  if (speech.rows() > 0) p.inputs.topRows(speech.rows()) = speech;
  p.inputs.bottomRows(text_emb.rows()) = text_emb;

  p.input_ids.assign(p.n_speech, -1);
  p.input_ids.insert(p.input_ids.end(), text.begin(), text.end());
  p.target_mask.assign(p.input_ids.size(), 0);
  if (transcript.has_value()) {
    for (std::size_t i = p.n_speech + p.template_length; i < p.input_ids.size(); ++i) {
      p.target_mask[i] = 1;
    }
  }
  return p;
}

}  // namespace slamkit
