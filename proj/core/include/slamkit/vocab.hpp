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
#include <string_view>
#include <unordered_map>
#include <vector>

#include "slamkit/linalg.hpp"

namespace slamkit {

// Rendered prompt that follows the speech embeddings. Byte-exact.
inline constexpr std::string_view kPromptTemplate =
    "<s>USER: Transcribe speech to text. ASSISTANT:";

enum class VocabKind { kSynthetic, kCharacters };

// Token inventory shared by the toy LM, the prompt, and WER scoring.
//
// Synthetic vocabularies reserve ids 0 (pad), 1 (<s>), 2 (</s>) and 3..8 for
// the six word pieces of the prompt; ids 9.. are content tokens named "w09",
// "w10", .... Character vocabularies cover the 128 ASCII code points, with
// ids 0/1/2 repurposed as pad/<s>/</s>.
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kBos = 1;
  static constexpr TokenId kEos = 2;
  static constexpr int kSyntheticReserved = 9;

  static Vocabulary synthetic(int size);
  static Vocabulary characters();

  VocabKind kind() const noexcept { return kind_; }
  int size() const noexcept { return static_cast<int>(pieces_.size()); }
  TokenId pad() const noexcept { return kPad; }
  TokenId bos() const noexcept { return kBos; }
  TokenId eos() const noexcept { return kEos; }

  const std::string& piece(TokenId id) const;
  bool contains(TokenId id) const noexcept { return id >= 0 && id < size(); }

  // Token ids of kPromptTemplate, starting with <s>.
  const TokenSequence& template_tokens() const noexcept { return template_; }
  // Tokens that may appear in transcripts.
  const TokenSequence& content_tokens() const noexcept { return content_; }

  // Transcript text to ids. Synthetic vocabularies split on whitespace and
  // look up content pieces; character vocabularies map each byte.
  TokenSequence encode_text(std::string_view text) const;
  // Inverse of encode_text for content tokens; specials are skipped.
  std::string decode_text(const TokenSequence& tokens) const;
  // Concatenation of raw pieces, specials included.
  std::string render(const TokenSequence& tokens) const;

 private:
  Vocabulary() = default;

  VocabKind kind_ = VocabKind::kSynthetic;
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, TokenId> lookup_;
  TokenSequence template_;
  TokenSequence content_;
};

}  // namespace slamkit
