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
#include <optional>
#include <string>
#include <vector>

#include "slamkit/decode.hpp"
#include "slamkit/features.hpp"
#include "slamkit/perturb.hpp"
#include "slamkit/train.hpp"
#include "slamkit/transformer.hpp"

namespace slamkit {

enum class SystemKind { kConnector, kConnectorLora, kCtc };

std::string to_string(SystemKind k);
SystemKind parse_system_kind(const std::string& s);

struct VocabConfig {
  std::string kind = "synthetic";  // or "characters"
  int size = 32;

  Vocabulary build() const;
};

struct PretrainSection {
  PretrainConfig config;
  int train_size = 2000;
  int dev_size = 200;
  int min_len = 3;
  int max_len = 8;
};

struct CorpusSection {
  int d_enc = 16;
  int train_size = 2000;
  int dev_size = 200;
  int test_size = 200;
  int min_len = 3;
  int max_len = 8;
  RateDistribution rate;
  double noise_sigma = 0.1;
};

struct SweepSection {
  PerturbKind kind = PerturbKind::kTempo;
  std::optional<SweepBounds> bounds;  // defaults per kind when absent
  NoiseClass noise_class = NoiseClass::kSynthetic;

  std::vector<PerturbCondition> grid(std::uint64_t seed) const;
};

struct ManifestPaths {
  std::string train;
  std::string dev;
  std::string test;
  std::string noise;
};

// Every randomness source derives from `seed` through named substreams.
struct RunConfig {
  SystemKind system = SystemKind::kConnector;
  std::uint64_t seed = 0;
  int workers = 0;  // 0: number of processors
  std::string output_dir;
  VocabConfig vocab;
  LmConfig lm = default_lm();
  PretrainSection pretrain;
  int projector_hidden = 2048;
  int k = 5;
  LoraOptions lora;
  TrainConfig train;
  CorpusSection corpus;
  DecodeConfig decode;
  SweepSection sweep;
  double runaway_factor = 4.0;
  int n_mels = 40;
  std::string train_tag = "toy";
  std::string eval_tag = "toy";
  ManifestPaths manifests;

  static LmConfig default_lm() {
    LmConfig c;
    c.vocab_size = 32;
    c.max_seq_len = 256;
    return c;
  }

  int resolved_workers() const;
};

// Strict JSON parsing: unknown keys anywhere are a ValidationError naming
// the dotted key path.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
// Fully resolved config (all defaults spelled out), stable key order.
std::string dump_run_config(const RunConfig& c);

// Applies "a.b.c=value" overrides; the value is parsed as JSON when
// possible and as a string otherwise.
RunConfig apply_overrides(const RunConfig& c, const std::vector<std::string>& assignments);

// Cross-field checks (vocab size vs LM, positive sizes, ...).
void validate(const RunConfig& c);

}  // namespace slamkit
