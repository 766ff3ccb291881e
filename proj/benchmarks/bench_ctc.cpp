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

#include "slamkit/ctc.hpp"
#include "slamkit/random.hpp"

namespace slamkit {
namespace {

CtcInstance instance(int t, int labels, int classes) {
  Rng rng = make_rng(2, "bench-ctc");
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix logits(t, classes);
  for (Eigen::Index i = 0; i < logits.size(); ++i) logits.data()[i] = g(rng);
  TokenSequence l;
  for (int i = 0; i < labels; ++i) l.push_back(1 + static_cast<int>(rng() % (classes - 1)));
  return {row_log_softmax(logits), l};
}

// Forward-backward with gradient, T frames and T/5 labels over 32 classes.
void BM_CtcLoss(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  const CtcInstance inst = instance(t, t / 5, 32);
  for (auto _ : state) benchmark::DoNotOptimize(ctc_loss(inst));
  state.SetComplexityN(t);
}
BENCHMARK(BM_CtcLoss)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_CtcBruteForce(benchmark::State& state) {
  const CtcInstance inst = instance(6, 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(ctc_brute_force(inst));
}
BENCHMARK(BM_CtcBruteForce);

}  // namespace
}  // namespace slamkit
