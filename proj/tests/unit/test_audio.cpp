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
#include <cstring>
#include <random>

#include "slamkit/audio.hpp"
#include "slamkit/error.hpp"
#include "slamkit/features.hpp"

namespace slamkit {
namespace {

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& b, const char* tag) { b.insert(b.end(), tag, tag + 4); }

// Canonical 44-byte RIFF/WAVE header for PCM16 mono, built field by field.
std::vector<std::uint8_t> canonical_header(std::uint32_t data_bytes, std::uint32_t rate = 16000) {
  std::vector<std::uint8_t> b;
  put_tag(b, "RIFF");
  put_u32(b, 36 + data_bytes);
  put_tag(b, "WAVE");
  put_tag(b, "fmt ");
  put_u32(b, 16);
  put_u16(b, 1);            // PCM
  put_u16(b, 1);            // mono
  put_u32(b, rate);
  put_u32(b, rate * 2);     // byte rate
  put_u16(b, 2);            // block align
  put_u16(b, 16);           // bits
  put_tag(b, "data");
  put_u32(b, data_bytes);
  return b;
}

TEST(Audio, CanonicalHeaderWithTwoZeroSamples) {
  auto bytes = canonical_header(4);
  ASSERT_EQ(bytes.size(), 44u);
  bytes.insert(bytes.end(), 4, 0);
  const Waveform w = read_wav(bytes);
  EXPECT_EQ(w.sample_rate(), 16000);
  EXPECT_EQ(w.channel_count(), 1);
  EXPECT_EQ(w.samples(), (std::vector<double>{0.0, 0.0}));
}

TEST(Audio, EmptyBytesAreAFormatError) {
  EXPECT_THROW(read_wav(std::vector<std::uint8_t>{}), FormatError);
}

TEST(Audio, TruncatedAndForeignHeadersAreFormatErrors) {
  auto bytes = canonical_header(4);
  bytes.insert(bytes.end(), 4, 0);
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + 20);
  EXPECT_THROW(read_wav(cut), FormatError);
  auto riff = bytes;
  std::memcpy(riff.data(), "RIFX", 4);
  EXPECT_THROW(read_wav(riff), FormatError);
}

TEST(Audio, MostNegativePcmMapsToMinusOne) {
  auto bytes = canonical_header(2);
  put_u16(bytes, 0x8000);
  EXPECT_EQ(read_wav(bytes).samples().front(), -1.0);
}

TEST(Audio, WriteZeroSample) {
  const WavWriteResult r = write_wav(Waveform({0.0}, 16000), WavEncoding::kPcm16);
  ASSERT_EQ(r.bytes.size(), 46u);
  std::uint32_t rate = 0;
  std::memcpy(&rate, r.bytes.data() + 24, 4);
  EXPECT_EQ(rate, 16000u);
  EXPECT_EQ(r.bytes[44], 0);
  EXPECT_EQ(r.bytes[45], 0);
  EXPECT_EQ(r.saturated, 0u);
}

TEST(Audio, Pcm16SaturatesAndCounts) {
  const WavWriteResult r = write_wav(Waveform({1.5, -2.0, 0.25}, 16000), WavEncoding::kPcm16);
  EXPECT_EQ(r.saturated, 2u);
  const Waveform back = read_wav(r.bytes);
  EXPECT_EQ(back.samples()[0], 32767.0 / 32768.0);
  EXPECT_EQ(back.samples()[1], -1.0);
}

TEST(Audio, Pcm16RoundTripIsBitExact) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> q(-32768, 32767);
  std::vector<double> s(100);
  for (auto& x : s) x = q(rng) / 32768.0;
  const Waveform w(s, 22050);
  EXPECT_EQ(read_wav(write_wav(w, WavEncoding::kPcm16).bytes), w);
}

TEST(Audio, Float32RoundTripAndStereo) {
  const std::vector<double> s = {0.125, -0.5, 0.75, 1.0};
  const Waveform st(s, 8000, 2);
  const Waveform back = read_wav(write_wav(st, WavEncoding::kFloat32).bytes);
  EXPECT_EQ(back, st);
  EXPECT_EQ(back.frame_count(), 2u);
  const Waveform mono = downmix(back);
  EXPECT_TRUE(mono.is_mono());
  EXPECT_DOUBLE_EQ(mono.samples()[0], (0.125 - 0.5) / 2);
  EXPECT_DOUBLE_EQ(mono.samples()[1], (0.75 + 1.0) / 2);
}

TEST(Audio, ResampleIdentityAndLength) {
  std::vector<double> s(4000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(0.01 * i);
  const Waveform w(s, 8000);
  EXPECT_EQ(resample(Waveform(s, 16000), 16000), Waveform(s, 16000));
  const Waveform up = resample(w, 16000);
  EXPECT_EQ(up.sample_rate(), 16000);
  EXPECT_EQ(up.frame_count(), 8000u);
}

TEST(Audio, UpsampledSineKeepsItsPeak) {
  const int n = 8000;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = std::sin(2 * M_PI * 440.0 * i / 8000.0);
  const Waveform up = resample(Waveform(s, 8000), 16000);
  const int n_fft = 16384;
  const auto p = power_spectrum(up.samples(), n_fft);
  const auto peak = std::max_element(p.begin(), p.end()) - p.begin();
  const double expected = 440.0 * n_fft / 16000.0;
  EXPECT_LE(std::abs(peak - expected), 1.0);
}

TEST(Audio, MeanPower) {
  EXPECT_EQ(mean_power(Waveform(std::vector<double>(10, 0.0), 16000)), 0.0);
  EXPECT_DOUBLE_EQ(mean_power(Waveform(std::vector<double>(7, 0.5), 16000)), 0.25);
  EXPECT_DOUBLE_EQ(mean_power(Waveform({1, -1, 1, -1}, 16000)), 1.0);
}

TEST(Audio, RejectsNonPositiveRates) {
  EXPECT_ANY_THROW(Waveform({0.0}, 0));
  EXPECT_ANY_THROW(resample(Waveform({0.0}, 16000), 0));
}

}  // namespace
}  // namespace slamkit
