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

#include "slamkit/checkpoint.hpp"
#include "slamkit/error.hpp"

namespace slamkit {
namespace {

LmConfig tiny_lm() {
  LmConfig c;
  c.vocab_size = 12;
  c.d_model = 8;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_seq_len = 32;
  return c;
}

TEST(Checkpoint, LmRoundTripKeepsFreeze) {
  ToyLM lm(tiny_lm(), Vocabulary::synthetic(12), 3);
  lm.freeze();
  const ToyLM back = lm_from_checkpoint(decode_checkpoint(encode_checkpoint(to_checkpoint(lm))));
  EXPECT_TRUE(back.frozen());
  EXPECT_EQ(back.checksum(), lm.checksum());
  EXPECT_EQ(back.config().max_seq_len, 32);
  EXPECT_EQ(back.vocab().size(), 12);
}

TEST(Checkpoint, ProjectorLoraCtc) {
  Projector p = Projector::init(10, 6, 8, 1);
  p.trained_epochs = 3;
  int k = 0;
  const Projector pb = projector_from_checkpoint(decode_checkpoint(encode_checkpoint(to_checkpoint(p, 5))), &k);
  EXPECT_EQ(k, 5);
  EXPECT_EQ(pb.w1, p.w1);
  EXPECT_EQ(pb.trained_epochs, 3);

  LoraSet l = LoraSet::init(2, 8, 2, 4.0, 2);
  l.value[1].b.setRandom();
  const LoraSet lb = lora_from_checkpoint(decode_checkpoint(encode_checkpoint(to_checkpoint(l))));
  EXPECT_EQ(lb.value[1].b, l.value[1].b);
  EXPECT_DOUBLE_EQ(lb.query[0].alpha, 4.0);

  CtcHead h = CtcHead::init(4, 6, 9);
  h.trained_epochs = 2;
  const CtcHead hb = ctc_head_from_checkpoint(decode_checkpoint(encode_checkpoint(to_checkpoint(h))));
  EXPECT_EQ(hb.weight, h.weight);
  EXPECT_EQ(hb.trained_epochs, 2);
}

TEST(Checkpoint, EncodingIsDeterministic) {
  const Projector p = Projector::init(4, 3, 2, 7);
  EXPECT_EQ(encode_checkpoint(to_checkpoint(p, 2)), encode_checkpoint(to_checkpoint(p, 2)));
}

TEST(Checkpoint, CorruptionAndKindMismatch) {
  auto bytes = encode_checkpoint(to_checkpoint(Projector::init(4, 3, 2, 7), 2));
  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x01;
  EXPECT_THROW(decode_checkpoint(flipped), FormatError);
  auto cut = bytes;
  cut.resize(10);
  EXPECT_THROW(decode_checkpoint(cut), FormatError);
  EXPECT_THROW(decode_checkpoint({}), FormatError);
  EXPECT_ANY_THROW(lora_from_checkpoint(decode_checkpoint(bytes)));
  EXPECT_THROW(load_checkpoint("/nonexistent/x.ckpt"), IoError);
}

}  // namespace
}  // namespace slamkit
