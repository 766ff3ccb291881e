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
#include <string>
#include <vector>

#include "slamkit/ctc.hpp"
#include "slamkit/linalg.hpp"
#include "slamkit/lora.hpp"
#include "slamkit/params.hpp"
#include "slamkit/projector.hpp"
#include "slamkit/transformer.hpp"

namespace slamkit {

// On-disk layout (little-endian):
//   "SKCK" | u32 version | u32 kind_len | kind | u32 meta_len | meta (JSON)
//   | u32 n_blocks | n x (u32 name_len | name | u32 rows | u32 cols)
//   | f64 blobs in table order | u64 FNV-1a of every preceding byte
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string kind;       // "lm", "projector", "lora", "ctc"
  std::string meta_json;  // kind-specific metadata
  std::vector<std::pair<std::string, Matrix>> blocks;

  const Matrix& block(const std::string& name) const;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
// Verifies magic, version and checksum.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint to_checkpoint(const ToyLM& lm);
ToyLM lm_from_checkpoint(const Checkpoint& ckpt);

// `k` is the frame-stacking factor the projector was trained with.
Checkpoint to_checkpoint(const Projector& p, int k);
Projector projector_from_checkpoint(const Checkpoint& ckpt, int* k = nullptr);

Checkpoint to_checkpoint(const LoraSet& lora);
LoraSet lora_from_checkpoint(const Checkpoint& ckpt);

Checkpoint to_checkpoint(const CtcHead& head);
CtcHead ctc_head_from_checkpoint(const Checkpoint& ckpt);

}  // namespace slamkit
