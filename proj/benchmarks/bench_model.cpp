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

#include <benchmark/benchmark.h>

#include "slamkit/transformer.hpp"

namespace slamkit {
namespace {

LmConfig toy_config() {
  LmConfig c;
  c.vocab_size = 32;
  c.max_seq_len = 256;
  return c;
}

// Full-sequence forward of the default toy LM over T input rows.
void BM_LmForward(benchmark::State& state) {
  const ToyLM lm(toy_config(), Vocabulary::synthetic(32), 5);
  const int t = static_cast<int>(state.range(0));
  const Matrix inputs = Matrix::Random(t, lm.d_model());
  for (auto _ : state) benchmark::DoNotOptimize(lm_forward(lm, inputs));
}
BENCHMARK(BM_LmForward)->RangeMultiplier(2)->Range(8, 128);

void BM_LmForwardBackward(benchmark::State& state) {
  const ToyLM lm(toy_config(), Vocabulary::synthetic(32), 5);
  const int t = static_cast<int>(state.range(0));
  const Matrix inputs = Matrix::Random(t, lm.d_model());
  std::vector<TokenId> targets(t);
  for (int i = 0; i < t; ++i) targets[i] = 9 + i % 20;
  for (auto _ : state) {
    LmTrace trace;
    const Matrix logits = lm_forward(lm, inputs, nullptr, &trace);
    const MaskedLoss loss = masked_cross_entropy(logits, targets);
    LmGradients grads;
    lm_backward(lm, trace, loss.d_logits, nullptr, true, grads);
    benchmark::DoNotOptimize(grads.inputs.data());
  }
}
BENCHMARK(BM_LmForwardBackward)->Arg(16)->Arg(64);

}  // namespace
}  // namespace slamkit
