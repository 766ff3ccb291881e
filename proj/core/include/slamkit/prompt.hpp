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

#include <optional>
#include <string>
#include <vector>

#include "slamkit/linalg.hpp"
#include "slamkit/transformer.hpp"

namespace slamkit {

// Text segments of the instruction prompt. Speech embeddings always come
// first, followed by the rendered template and then the transcript.
struct PromptLayout {
  std::string user_marker = "USER:";
  std::string instruction = "Transcribe speech to text.";
  std::string assistant_marker = "ASSISTANT:";

  // "<s>" + user + " " + instruction + " " + assistant.
  std::string render() const;
  TokenSequence template_tokens(const Vocabulary& vocab) const;
};

struct AssembledPrompt {
  Matrix inputs;                    // (n + L_template [+ transcript + 1]) x d
  std::vector<TokenId> input_ids;   // -1 at speech positions
  std::vector<std::uint8_t> target_mask;
  int n_speech = 0;
  int template_length = 0;

  int length() const { return static_cast<int>(inputs.rows()); }
  // Row t of the logits predicts input_ids[t + 1] where that position is
  // loss-bearing; -1 elsewhere.
  std::vector<TokenId> next_token_targets() const;
};

AssembledPrompt assemble_prompt(const PromptLayout& layout, const Matrix& speech,
                                const ToyLM& lm,
                                const std::optional<TokenSequence>& transcript = std::nullopt);

}  // namespace slamkit
