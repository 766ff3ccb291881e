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

#include "slamkit/vocab.hpp"

#include <cstdio>
#include <sstream>

#include "slamkit/error.hpp"

namespace slamkit {

namespace {

// The prompt split into word pieces; concatenation reproduces the template.
const std::vector<std::string>& prompt_pieces() {
  static const std::vector<std::string> pieces = {
      "USER:", " Transcribe", " speech", " to", " text.", " ASSISTANT:"};
  return pieces;
}

}  // namespace

Vocabulary Vocabulary::synthetic(int size) {
  require(size > kSyntheticReserved,
          "synthetic vocabulary needs more than " + std::to_string(kSyntheticReserved) +
              " entries");
  Vocabulary v;
  v.kind_ = VocabKind::kSynthetic;
  v.pieces_ = {"<pad>", "<s>", "</s>"};
  for (const auto& p : prompt_pieces()) v.pieces_.push_back(p);
  for (int id = kSyntheticReserved; id < size; ++id) {
    char name[16];
    std::snprintf(name, sizeof(name), "w%02d", id);
    v.pieces_.emplace_back(name);
    v.content_.push_back(id);
  }
  for (TokenId id = 0; id < v.size(); ++id) v.lookup_.emplace(v.pieces_[id], id);
  v.template_.push_back(kBos);
  for (TokenId id = 3; id < kSyntheticReserved; ++id) v.template_.push_back(id);
  return v;
}

Vocabulary Vocabulary::characters() {
  Vocabulary v;
  v.kind_ = VocabKind::kCharacters;
  v.pieces_.resize(128);
  for (int c = 0; c < 128; ++c) {
    if (c >= 32 && c < 127) {
      v.pieces_[c] = std::string(1, static_cast<char>(c));
    } else {
      char name[16];
      std::snprintf(name, sizeof(name), "<0x%02X>", c);
      v.pieces_[c] = name;
    }
  }
  v.pieces_[kPad] = "<pad>";
  v.pieces_[kBos] = "<s>";
  v.pieces_[kEos] = "</s>";
  for (TokenId id = 0; id < v.size(); ++id) v.lookup_.emplace(v.pieces_[id], id);
  v.template_.push_back(kBos);
  for (char c : kPromptTemplate.substr(3)) v.template_.push_back(static_cast<TokenId>(c));
  for (char c = 'a'; c <= 'z'; ++c) v.content_.push_back(c);
  for (char c = '0'; c <= '9'; ++c) v.content_.push_back(c);
  v.content_.push_back('\'');
  v.content_.push_back(' ');
  return v;
}

const std::string& Vocabulary::piece(TokenId id) const {
  require(contains(id), "token id " + std::to_string(id) + " outside the vocabulary");
  return pieces_[id];
}

TokenSequence Vocabulary::encode_text(std::string_view text) const {
  TokenSequence out;
  if (kind_ == VocabKind::kCharacters) {
    for (char c : text) {
      const auto code = static_cast<unsigned char>(c);
      if (code < 32 || code >= 127) {
        throw ValidationError("character vocabulary cannot encode byte " +
                              std::to_string(code));
      }
      out.push_back(static_cast<TokenId>(code));
    }
    return out;
  }
  std::istringstream words{std::string(text)};
  std::string w;
  while (words >> w) {
    const auto it = lookup_.find(w);
    if (it == lookup_.end() || it->second < kSyntheticReserved) {
      throw ValidationError("'" + w + "' is not a content token of the synthetic vocabulary");
    }
    out.push_back(it->second);
  }
  return out;
}

std::string Vocabulary::decode_text(const TokenSequence& tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (!contains(t)) continue;
    if (kind_ == VocabKind::kCharacters) {
      if (t >= 32 && t < 127) out += pieces_[t];
    } else if (t >= kSyntheticReserved) {
      if (!out.empty()) out += ' ';
      out += pieces_[t];
    }
  }
  return out;
}

std::string Vocabulary::render(const TokenSequence& tokens) const {
  std::string out;
  for (TokenId t : tokens) out += piece(t);
  return out;
}

}  // namespace slamkit
