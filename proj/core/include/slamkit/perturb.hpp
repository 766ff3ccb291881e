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

#include "slamkit/audio.hpp"
#include "slamkit/features.hpp"

namespace slamkit {

enum class PerturbKind { kTempo, kNoise };
enum class NoiseClass { kBabble, kMusic, kSynthetic };

std::string to_string(PerturbKind kind);
std::string to_string(NoiseClass cls);
PerturbKind parse_perturb_kind(const std::string& s);
NoiseClass parse_noise_class(const std::string& s);

// A single sweep point. Only the fields of the declared kind are populated.
class PerturbCondition {
 public:
  static PerturbCondition tempo(double ratio);
  static PerturbCondition noise(double snr_db, NoiseClass cls, std::uint64_t seed);

  PerturbKind kind() const noexcept { return kind_; }
  double ratio() const;
  double snr_db() const;
  NoiseClass noise_class() const;
  std::uint64_t seed() const;

  // Axis value: ratio for tempo, snr_db for noise.
  double axis_value() const noexcept;
  // Stable label used in CSV output, e.g. "tempo=0.5" or "noise=20".
  std::string label() const;
  bool is_identity() const noexcept;

  friend bool operator==(const PerturbCondition&, const PerturbCondition&) = default;

 private:
  PerturbCondition() = default;

  PerturbKind kind_ = PerturbKind::kTempo;
  std::optional<double> ratio_;
  std::optional<double> snr_db_;
  std::optional<NoiseClass> noise_class_;
  std::optional<std::uint64_t> seed_;
};

struct WsolaConfig {
  int frame_length = 1024;
  int synthesis_hop = 512;
  int tolerance = 512;
};

inline constexpr double kMinTempoRatio = 0.25;
inline constexpr double kMaxTempoRatio = 4.0;

// Pitch-preserving time-scale modification (WSOLA). `ratio` multiplies the
// speaking rate, so the output lasts len/ratio samples; ratio 1 is a bypass.
Waveform time_scale(const Waveform& w, double ratio, const WsolaConfig& config = {});

struct NoiseMix {
  Waveform mixed;
  double gain = 0.0;
  std::size_t offset = 0;
  // The looped/truncated noise before scaling; same length as the signal.
  std::vector<double> aligned_noise;
};

NoiseMix mix_noise_detailed(const Waveform& signal, const Waveform& noise,
                            double snr_db, std::uint64_t seed);
Waveform mix_noise(const Waveform& signal, const Waveform& noise, double snr_db,
                   std::uint64_t seed);

// Deterministic pink (1/f) noise, normalized to unit mean power.
Waveform pink_noise(std::size_t n_samples, int sample_rate, std::uint64_t seed);

struct SweepBounds {
  double min = 0.0;
  double max = 0.0;
  double step = 0.0;
};

inline constexpr SweepBounds kDefaultTempoBounds{0.5, 1.5, 0.1};
inline constexpr SweepBounds kDefaultNoiseBounds{0.0, 30.0, 5.0};

// Inclusive arithmetic grid. Noise conditions take seeds from the named
// "noise-offset" substream of `seed`, one per grid point.
std::vector<PerturbCondition> make_grid(PerturbKind kind, SweepBounds bounds,
                                        NoiseClass cls = NoiseClass::kSynthetic,
                                        std::uint64_t seed = 0);
std::vector<PerturbCondition> make_grid(PerturbKind kind);

// Frame-domain analogues used when a record carries precomputed features
// rather than audio: nearest-frame resampling to round(n/ratio) frames, and
// white noise scaled to the requested SNR over all feature entries.
FrameSequence time_scale_frames(const FrameSequence& f, double ratio);
FrameSequence mix_noise_frames(const FrameSequence& f, double snr_db, std::uint64_t seed);

}  // namespace slamkit
