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

#include "slamkit/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

std::string to_string(PerturbKind kind) {
  return kind == PerturbKind::kTempo ? "tempo" : "noise";
}

std::string to_string(NoiseClass cls) {
  switch (cls) {
    case NoiseClass::kBabble: return "babble";
    case NoiseClass::kMusic: return "music";
    case NoiseClass::kSynthetic: return "synthetic";
  }
  return "synthetic";
}

PerturbKind parse_perturb_kind(const std::string& s) {
  if (s == "tempo") return PerturbKind::kTempo;
  if (s == "noise") return PerturbKind::kNoise;
  throw ValidationError("unknown perturbation kind '" + s + "' (expected tempo|noise)");
}

NoiseClass parse_noise_class(const std::string& s) {
  if (s == "babble") return NoiseClass::kBabble;
  if (s == "music") return NoiseClass::kMusic;
  if (s == "synthetic") return NoiseClass::kSynthetic;
  throw ValidationError("unknown noise class '" + s + "' (expected babble|music|synthetic)");
}

PerturbCondition PerturbCondition::tempo(double ratio) {
  require(std::isfinite(ratio) && ratio > 0.0, "tempo ratio must be positive");
  PerturbCondition c;
  c.kind_ = PerturbKind::kTempo;
  c.ratio_ = ratio;
  return c;
}

PerturbCondition PerturbCondition::noise(double snr_db, NoiseClass cls, std::uint64_t seed) {
  require(std::isfinite(snr_db), "noise snr_db must be finite");
  PerturbCondition c;
  c.kind_ = PerturbKind::kNoise;
  c.snr_db_ = snr_db;
  c.noise_class_ = cls;
  c.seed_ = seed;
  return c;
}

double PerturbCondition::ratio() const {
  require(ratio_.has_value(), "ratio requested from a noise condition");
  return *ratio_;
}

double PerturbCondition::snr_db() const {
  require(snr_db_.has_value(), "snr_db requested from a tempo condition");
  return *snr_db_;
}

NoiseClass PerturbCondition::noise_class() const {
  require(noise_class_.has_value(), "noise_class requested from a tempo condition");
  return *noise_class_;
}

std::uint64_t PerturbCondition::seed() const {
  require(seed_.has_value(), "seed requested from a tempo condition");
  return *seed_;
}

double PerturbCondition::axis_value() const noexcept {
  return kind_ == PerturbKind::kTempo ? *ratio_ : *snr_db_;
}

std::string PerturbCondition::label() const {
  std::ostringstream os;
  os << to_string(kind_) << '=' << axis_value();
  return os.str();
}

bool PerturbCondition::is_identity() const noexcept {
  return kind_ == PerturbKind::kTempo && *ratio_ == 1.0;
}

Waveform time_scale(const Waveform& w, double ratio, const WsolaConfig& config) {
  require(w.is_mono(), "time_scale requires mono audio");
  require(ratio >= kMinTempoRatio && ratio <= kMaxTempoRatio,
          "time_scale ratio must lie in [0.25, 4]");
  if (ratio == 1.0) return w;

  const int frame = config.frame_length;
  const int hop = config.synthesis_hop;
  const int tol = config.tolerance;
  const int overlap = frame - hop;
  require(hop > 0 && hop < frame && tol >= 0, "invalid WSOLA configuration");

  const auto& x = w.samples();
  const auto n_in = static_cast<std::ptrdiff_t>(x.size());
  const auto out_len = static_cast<std::ptrdiff_t>(std::llround(n_in / ratio));
  const double analysis_hop = hop * ratio;

  // Zero-padded copy so every candidate segment is addressable.
  const std::ptrdiff_t pad_left = frame + tol;
  const std::ptrdiff_t pad_right = 2 * frame + tol + static_cast<std::ptrdiff_t>(8 * hop);
  std::vector<double> xp(static_cast<std::size_t>(pad_left + n_in + pad_right), 0.0);
  std::copy(x.begin(), x.end(), xp.begin() + pad_left);
  std::vector<double> energy_prefix(xp.size() + 1, 0.0);
  for (std::size_t i = 0; i < xp.size(); ++i) {
    energy_prefix[i + 1] = energy_prefix[i] + xp[i] * xp[i];
  }
  auto energy = [&](std::ptrdiff_t start) {
    return energy_prefix[start + overlap] - energy_prefix[start];
  };

  std::vector<double> window(frame);
  for (int i = 0; i < frame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame);
  }

  std::vector<double> out(static_cast<std::size_t>(std::max<std::ptrdiff_t>(out_len, 0)), 0.0);
  std::vector<double> norm(out.size(), 0.0);
  std::ptrdiff_t prev = 0;
  for (std::ptrdiff_t m = 0; m * hop - frame / 2 < out_len; ++m) {
    const std::ptrdiff_t out_start = m * hop - frame / 2;
    const std::ptrdiff_t nominal =
        pad_left + static_cast<std::ptrdiff_t>(std::llround(m * analysis_hop)) - frame / 2;
    std::ptrdiff_t chosen = nominal;
    if (m > 0) {
      // Pick the candidate most similar to the natural continuation of the
      // previous segment; scan outward from zero offset so ties stay central.
      const std::ptrdiff_t natural = prev + hop;
      const double e_nat = energy(natural);
      double best = -2.0;
      for (int step = 0; step <= 2 * tol; ++step) {
        const int delta = (step % 2 == 0) ? step / 2 : -(step + 1) / 2;
        const std::ptrdiff_t cand = nominal + delta;
        double dot = 0.0;
        for (int i = 0; i < overlap; ++i) dot += xp[cand + i] * xp[natural + i];
        const double denom = std::sqrt(energy(cand) * e_nat);
        const double score = denom > 1e-12 ? dot / denom : 0.0;
        if (score > best) {
          best = score;
          chosen = cand;
        }
      }
    }
    for (int i = 0; i < frame; ++i) {
      const std::ptrdiff_t o = out_start + i;
      if (o < 0 || o >= out_len) continue;
      out[o] += window[i] * xp[chosen + i];
      norm[o] += window[i];
    }
    prev = chosen;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (norm[i] > 1e-6) out[i] /= norm[i];
  }
  return Waveform(std::move(out), w.sample_rate(), 1);
}

NoiseMix mix_noise_detailed(const Waveform& signal, const Waveform& noise,
                            double snr_db, std::uint64_t seed) {
  require(signal.is_mono() && noise.is_mono(), "mix_noise requires mono inputs");
  require(signal.sample_rate() == noise.sample_rate(),
          "mix_noise sample-rate mismatch: signal " + std::to_string(signal.sample_rate()) +
              " Hz, noise " + std::to_string(noise.sample_rate()) + " Hz");
  require(!noise.empty(), "mix_noise: empty noise waveform");
  require(std::isfinite(snr_db), "mix_noise: snr_db must be finite");

  NoiseMix result;
  const auto& s = signal.samples();
  const auto& n = noise.samples();
  Rng rng = make_rng(seed, "noise-offset");
  result.offset = std::uniform_int_distribution<std::size_t>(0, n.size() - 1)(rng);
  result.aligned_noise.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    result.aligned_noise[i] = n[(result.offset + i) % n.size()];
  }
  if (s.empty()) {
    result.mixed = signal;
    return result;
  }
  const double p_signal = mean_power(s);
  const double p_noise = mean_power(std::span(result.aligned_noise));
  require(p_noise > 0.0, "mix_noise: noise segment has zero power");
  // A silent signal makes every SNR unreachable (the gain would be 0).
  require(p_signal > 0.0, "mix_noise: signal has zero power");
  result.gain = std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));

  std::vector<double> mixed(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    mixed[i] = s[i] + result.gain * result.aligned_noise[i];
  }
  result.mixed = Waveform(std::move(mixed), signal.sample_rate(), 1);
  return result;
}

Waveform mix_noise(const Waveform& signal, const Waveform& noise, double snr_db,
                   std::uint64_t seed) {
  return mix_noise_detailed(signal, noise, snr_db, seed).mixed;
}

Waveform pink_noise(std::size_t n_samples, int sample_rate, std::uint64_t seed) {
  require(n_samples > 0, "pink_noise needs at least one sample");
  Rng rng = make_rng(seed, "pink-noise");
  std::normal_distribution<double> white(0.0, 1.0);
  // Paul Kellett's refined pinking filter.
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  std::vector<double> out(n_samples);
  for (auto& v : out) {
    const double wn = white(rng);
    b0 = 0.99886 * b0 + wn * 0.0555179;
    b1 = 0.99332 * b1 + wn * 0.0750759;
    b2 = 0.96900 * b2 + wn * 0.1538520;
    b3 = 0.86650 * b3 + wn * 0.3104856;
    b4 = 0.55000 * b4 + wn * 0.5329522;
    b5 = -0.7616 * b5 - wn * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + wn * 0.5362;
    b6 = wn * 0.115926;
  }
  const double scale = 1.0 / std::sqrt(mean_power(std::span(out)));
  for (auto& v : out) v *= scale;
  return Waveform(std::move(out), sample_rate, 1);
}

std::vector<PerturbCondition> make_grid(PerturbKind kind, SweepBounds b, NoiseClass cls,
                                        std::uint64_t seed) {
  require(b.step > 0.0, "sweep step must be positive");
  require(b.max >= b.min, "sweep max must be >= min");
  const auto n = static_cast<int>(std::floor((b.max - b.min) / b.step + 1e-9)) + 1;
  std::vector<PerturbCondition> grid;
  grid.reserve(n);
  for (int i = 0; i < n; ++i) {
    // Snap to a 1e-9 lattice so 0.5 + 5 * 0.1 is exactly 1.0.
    const double v = std::round((b.min + i * b.step) * 1e9) / 1e9;
    if (kind == PerturbKind::kTempo) {
      grid.push_back(PerturbCondition::tempo(v));
    } else {
      grid.push_back(PerturbCondition::noise(
          v, cls, substream_seed(seed, "noise-offset", static_cast<std::uint64_t>(i))));
    }
  }
  return grid;
}

std::vector<PerturbCondition> make_grid(PerturbKind kind) {
  return make_grid(kind, kind == PerturbKind::kTempo ? kDefaultTempoBounds
                                                      : kDefaultNoiseBounds);
}

FrameSequence time_scale_frames(const FrameSequence& f, double ratio) {
  require(ratio >= kMinTempoRatio && ratio <= kMaxTempoRatio,
          "frame time-scale ratio must lie in [0.25, 4]");
  if (ratio == 1.0) return f;
  const Eigen::Index n = f.n_frames();
  const auto n_out = static_cast<Eigen::Index>(std::llround(n / ratio));
  FrameSequence out;
  out.frame_rate = f.frame_rate;
  out.frames.resize(n_out, f.dim());
  for (Eigen::Index j = 0; j < n_out; ++j) {
    const auto src = std::min<Eigen::Index>(
        n - 1, static_cast<Eigen::Index>(std::floor(static_cast<double>(j) * ratio)));
    out.frames.row(j) = f.frames.row(src);
  }
  return out;
}

FrameSequence mix_noise_frames(const FrameSequence& f, double snr_db, std::uint64_t seed) {
  require(std::isfinite(snr_db), "snr_db must be finite");
  if (f.frames.size() == 0) return f;
  Rng rng = make_rng(seed, "frame-noise");
  std::normal_distribution<double> white(0.0, 1.0);
  Matrix noise(f.frames.rows(), f.frames.cols());
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = white(rng);
  const double p_signal = f.frames.squaredNorm() / static_cast<double>(f.frames.size());
  const double p_noise = noise.squaredNorm() / static_cast<double>(noise.size());
  const double gain = std::sqrt(p_signal / (p_noise * std::pow(10.0, snr_db / 10.0)));
  FrameSequence out = f;
  out.frames += gain * noise;
  return out;
}

}  // namespace slamkit
