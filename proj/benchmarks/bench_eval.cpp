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

#include "slamkit/eval.hpp"
#include "slamkit/random.hpp"

namespace slamkit {
namespace {

std::vector<int> random_words(Rng& rng, int n, int alphabet) {
  std::vector<int> w(n);
  for (auto& x : w) x = static_cast<int>(rng() % alphabet);
  return w;
}

// Edit alignment of an utterance-sized ref/hyp pair, ~10% errors.
void BM_AlignEdit(benchmark::State& state) {
  Rng rng = make_rng(1, "bench-align");
  const int n = static_cast<int>(state.range(0));
  const auto ref = random_words(rng, n, 500);
  auto hyp = ref;
  for (int i = 0; i < n; i += 10) hyp[i] = static_cast<int>(rng() % 500);
  for (auto _ : state) benchmark::DoNotOptimize(align_edit(ref, hyp));
  state.SetComplexityN(n);
}
BENCHMARK(BM_AlignEdit)->RangeMultiplier(4)->Range(16, 1024)->Complexity(benchmark::oNSquared);

void BM_NormalizeText(benchmark::State& state) {
  const std::string text = "Hello, World!  It's a (quick) test -- of NORMALIZATION; 42 times.";
  for (auto _ : state) benchmark::DoNotOptimize(normalize_text(text));
}
BENCHMARK(BM_NormalizeText);

}  // namespace
}  // namespace slamkit
