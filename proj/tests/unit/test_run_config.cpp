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

#include <gtest/gtest.h>

#include "slamkit/error.hpp"
#include "slamkit/run_config.hpp"

namespace slamkit {
namespace {

TEST(RunConfig, DefaultsValidateAndRoundTrip) {
  const RunConfig c;
  EXPECT_NO_THROW(validate(c));
  EXPECT_EQ(c.train.batch_size, 4);
  EXPECT_EQ(c.train.max_epochs, 3);
  EXPECT_DOUBLE_EQ(c.train.learning_rate, 1e-4);
  EXPECT_EQ(c.decode.beam_width, 4);
  const std::string text = dump_run_config(c);
  EXPECT_EQ(dump_run_config(parse_run_config(text)), text);
}

TEST(RunConfig, PartialDocumentsMergeOverDefaults) {
  const RunConfig c = parse_run_config(R"({"system": "ctc", "train": {"max_epochs": 7}, "sweep": {"kind": "noise"}})");
  EXPECT_EQ(c.system, SystemKind::kCtc);
  EXPECT_EQ(c.train.max_epochs, 7);
  EXPECT_EQ(c.train.batch_size, 4);
  EXPECT_EQ(c.sweep.grid(0).size(), 7u);
}

TEST(RunConfig, UnknownKeysAndWrongTypesAreRejected) {
  try {
    parse_run_config(R"({"train": {"learning_rat": 1}})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("train.learning_rat"), std::string::npos);
  }
  EXPECT_THROW(parse_run_config(R"({"seed": "x"})"), ValidationError);
  EXPECT_THROW(parse_run_config("{"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"system": "hmm"})"), ValidationError);
}

TEST(RunConfig, Overrides) {
  const RunConfig c = apply_overrides(RunConfig{}, {"train.max_epochs=9", "system=connector+lora", "sweep.bounds={\"min\":0.8,\"max\":1.2,\"step\":0.2}"});
  EXPECT_EQ(c.train.max_epochs, 9);
  EXPECT_EQ(c.system, SystemKind::kConnectorLora);
  EXPECT_EQ(c.sweep.grid(0).size(), 3u);
  EXPECT_THROW(apply_overrides(RunConfig{}, {"nokey=1"}), ValidationError);
  EXPECT_THROW(apply_overrides(RunConfig{}, {"train.max_epochs"}), ValidationError);
}

TEST(RunConfig, Validation) {
  RunConfig c;
  c.k = 0;
  EXPECT_THROW(validate(c), ValidationError);
  c = {};
  c.lm.n_heads = 3;  // does not divide d_model 64
  EXPECT_THROW(validate(c), ValidationError);
  c = {};
  c.vocab.size = 5;
  EXPECT_THROW(validate(c), ValidationError);
}

}  // namespace
}  // namespace slamkit
