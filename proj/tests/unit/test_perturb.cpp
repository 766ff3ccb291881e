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

#include <cmath>
#include <random>

#include "slamkit/error.hpp"
#include "slamkit/perturb.hpp"

namespace slamkit {
namespace {

Waveform gaussian(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> s(n);
  for (auto& x : s) x = g(rng);
  return Waveform(std::move(s), 16000);
}

TEST(TimeScale, UnitRatioIsABitExactBypass) {
  const Waveform w = gaussian(12345, 0.3, 1);
  EXPECT_EQ(time_scale(w, 1.0), w);
}

TEST(TimeScale, LengthFollowsTheRatio) {
  const Waveform w = gaussian(16000, 0.3, 2);
  EXPECT_NEAR(static_cast<double>(time_scale(w, 0.5).frame_count()), 32000.0, 512.0);
  EXPECT_NEAR(static_cast<double>(time_scale(w, 1.5).frame_count()), 10667.0, 512.0);
}

TEST(TimeScale, RejectsOutOfRangeRatios) {
  const Waveform w = gaussian(1000, 0.3, 3);
  EXPECT_THROW(time_scale(w, 0.1), PreconditionError);
  EXPECT_THROW(time_scale(w, 5.0), PreconditionError);
  EXPECT_THROW(time_scale(Waveform({0.1, 0.2}, 16000, 2), 0.9), PreconditionError);
}

TEST(MixNoise, GainFormula) {
  const Waveform s(std::vector<double>(4000, 1.0), 16000);
  const Waveform n(std::vector<double>(4000, -1.0), 16000);
  EXPECT_NEAR(mix_noise_detailed(s, n, 0.0, 7).gain, 1.0, 1e-15);
  EXPECT_NEAR(mix_noise_detailed(s, n, 10.0, 7).gain, std::pow(10.0, -0.5), 1e-15);
  EXPECT_NEAR(mix_noise_detailed(s, n, 10.0, 7).gain, 0.31623, 1e-5);
}

TEST(MixNoise, HugeSnrReturnsTheSignal) {
  const Waveform s = gaussian(3000, 0.2, 4), n = gaussian(5000, 1.0, 5);
  const Waveform m = mix_noise(s, n, 300.0, 9);
  ASSERT_EQ(m.frame_count(), s.frame_count());
  for (std::size_t i = 0; i < m.frame_count(); ++i) EXPECT_NEAR(m.samples()[i], s.samples()[i], 1e-12);
}

TEST(MixNoise, MeasuredSnrMatchesTarget) {
  for (int i = 0; i < 20; ++i) {
    const Waveform s = gaussian(2000 + 37 * i, 0.1 + 0.01 * i, 100 + i);
    const Waveform n = gaussian(700 + 91 * i, 1.0, 200 + i);  // shorter and longer than s
    const NoiseMix m = mix_noise_detailed(s, n, 5.0 * (i % 7), 300 + i);
    ASSERT_EQ(m.aligned_noise.size(), s.frame_count());
    std::vector<double> scaled = m.aligned_noise;
    for (auto& x : scaled) x *= m.gain;
    const double snr = 10 * std::log10(mean_power(s) / mean_power(std::span<const double>(scaled)));
    EXPECT_NEAR(snr, 5.0 * (i % 7), 1e-9);
    for (std::size_t t = 0; t < s.frame_count(); ++t) {
      EXPECT_DOUBLE_EQ(m.mixed.samples()[t], s.samples()[t] + scaled[t]);
    }
  }
}

TEST(MixNoise, SeedSelectsTheOffset) {
  const Waveform s = gaussian(1000, 0.2, 6), n = gaussian(9000, 1.0, 7);
  EXPECT_EQ(mix_noise(s, n, 10, 1), mix_noise(s, n, 10, 1));
  EXPECT_NE(mix_noise_detailed(s, n, 10, 1).offset, mix_noise_detailed(s, n, 10, 2).offset);
}

TEST(MixNoise, SilentInputsFail) {
  const Waveform s = gaussian(100, 0.2, 8);
  const Waveform z(std::vector<double>(100, 0.0), 16000);
  EXPECT_ANY_THROW(mix_noise(s, z, 10, 1));
  EXPECT_ANY_THROW(mix_noise(z, s, 10, 1));
  EXPECT_ANY_THROW(mix_noise(s, Waveform(s.samples(), 8000), 10, 1));
}

TEST(Grid, Defaults) {
  const auto tempo = make_grid(PerturbKind::kTempo);
  ASSERT_EQ(tempo.size(), 11u);
  EXPECT_DOUBLE_EQ(tempo.front().ratio(), 0.5);
  EXPECT_DOUBLE_EQ(tempo.back().ratio(), 1.5);
  EXPECT_TRUE(tempo[5].is_identity());
  const auto noise = make_grid(PerturbKind::kNoise);
  ASSERT_EQ(noise.size(), 7u);
  for (int i = 0; i < 7; ++i) EXPECT_DOUBLE_EQ(noise[i].snr_db(), 5.0 * i);
}

TEST(Grid, SinglePointAndInvalidBounds) {
  const auto one = make_grid(PerturbKind::kTempo, {1.0, 1.0, 0.1});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].is_identity());
  EXPECT_ANY_THROW(make_grid(PerturbKind::kTempo, {1.5, 0.5, 0.1}));
  EXPECT_ANY_THROW(make_grid(PerturbKind::kTempo, {0.5, 1.5, 0.0}));
}

TEST(Condition, NoiseSeedsDifferPerGridPoint) {
  const auto g = make_grid(PerturbKind::kNoise, kDefaultNoiseBounds, NoiseClass::kBabble, 11);
  EXPECT_EQ(g[0].noise_class(), NoiseClass::kBabble);
  EXPECT_NE(g[0].seed(), g[1].seed());
  EXPECT_EQ(g, make_grid(PerturbKind::kNoise, kDefaultNoiseBounds, NoiseClass::kBabble, 11));
  EXPECT_THROW(g[0].ratio(), PreconditionError);
}

TEST(FrameDomain, TempoAndNoise) {
  FrameSequence f;
  f.frames = Matrix::Random(20, 3);
  EXPECT_EQ(time_scale_frames(f, 0.5).n_frames(), 40);
  EXPECT_EQ(time_scale_frames(f, 2.0).n_frames(), 10);
  EXPECT_EQ(time_scale_frames(f, 1.0).frames, f.frames);
  const FrameSequence noisy = mix_noise_frames(f, 10.0, 3);
  const double ps = f.frames.squaredNorm(), pn = (noisy.frames - f.frames).squaredNorm();
  EXPECT_NEAR(10 * std::log10(ps / pn), 10.0, 1e-9);
}

}  // namespace
}  // namespace slamkit
