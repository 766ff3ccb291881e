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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace slamkit {

// Interleaved audio at unit scale. Construction validates the invariants:
// positive rate and channel count, finite samples, and a sample count that
// is a multiple of the channel count.
class Waveform {
 public:
  Waveform() = default;
  Waveform(std::vector<double> samples, int sample_rate, int channel_count = 1);

  const std::vector<double>& samples() const noexcept { return samples_; }
  int sample_rate() const noexcept { return sample_rate_; }
  int channel_count() const noexcept { return channel_count_; }

  std::size_t frame_count() const noexcept {
    return channel_count_ > 0 ? samples_.size() / channel_count_ : 0;
  }
  double duration_seconds() const noexcept {
    return sample_rate_ > 0 ? static_cast<double>(frame_count()) / sample_rate_
                            : 0.0;
  }
  bool empty() const noexcept { return samples_.empty(); }
  bool is_mono() const noexcept { return channel_count_ == 1; }

  friend bool operator==(const Waveform&, const Waveform&) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_ = 16000;
  int channel_count_ = 1;
};

enum class WavEncoding { kPcm16, kFloat32 };

struct WavWriteResult {
  std::vector<std::uint8_t> bytes;
  // Samples outside [-1, 1] that were clipped during PCM16 export.
  std::size_t saturated = 0;
};

Waveform read_wav(std::span<const std::uint8_t> bytes);
WavWriteResult write_wav(const Waveform& w, WavEncoding encoding);

Waveform read_wav_file(const std::string& path);
// Returns the saturation count of the export.
std::size_t write_wav_file(const std::string& path, const Waveform& w,
                           WavEncoding encoding = WavEncoding::kPcm16);

// Averages channels into a mono waveform.
Waveform downmix(const Waveform& w);

// Band-limited resampling with a 32-tap Hann-windowed sinc kernel. Mono only.
Waveform resample(const Waveform& w, int target_rate);

double mean_power(const Waveform& w);
double mean_power(std::span<const double> samples);

}  // namespace slamkit
