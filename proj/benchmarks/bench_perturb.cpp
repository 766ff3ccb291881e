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

#include <cmath>

#include "slamkit/features.hpp"
#include "slamkit/perturb.hpp"

namespace slamkit {
namespace {

Waveform tone(double seconds) {
  constexpr int kRate = 16000;
  std::vector<double> s(static_cast<std::size_t>(seconds * kRate));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = 0.5 * std::sin(2.0 * M_PI * 220.0 * i / kRate);
  return Waveform(std::move(s), kRate);
}

// WSOLA on one second of audio; the argument is the ratio in percent.
void BM_TimeScale(benchmark::State& state) {
  const Waveform w = tone(1.0);
  const double ratio = state.range(0) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(time_scale(w, ratio));
}
BENCHMARK(BM_TimeScale)->Arg(50)->Arg(90)->Arg(110)->Arg(150);

void BM_MixNoise(benchmark::State& state) {
  const Waveform w = tone(1.0);
  const Waveform n = pink_noise(8000, 16000, 3);
  for (auto _ : state) benchmark::DoNotOptimize(mix_noise(w, n, 10.0, 4));
}
BENCHMARK(BM_MixNoise);

void BM_LogMel(benchmark::State& state) {
  const Waveform w = tone(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(logmel_frontend(w));
}
BENCHMARK(BM_LogMel);

}  // namespace
}  // namespace slamkit
