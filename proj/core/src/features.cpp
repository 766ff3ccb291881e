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

#include "slamkit/features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <mutex>
#include <numbers>

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// FFTW planning is not reentrant; execution with new arrays is.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
    plan_ = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  // Power spectrum |X_k|^2 for k = 0..n/2 of the real input (length n).
  void power(const double* input, std::vector<double>& spectrum) const {
    double* in = fftw_alloc_real(n_);
    fftw_complex* out = fftw_alloc_complex(n_ / 2 + 1);
    std::copy(input, input + n_, in);
    fftw_execute_dft_r2c(plan_, in, out);
    spectrum.resize(n_ / 2 + 1);
    for (int k = 0; k <= n_ / 2; ++k) {
      spectrum[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    }
    fftw_free(in);
    fftw_free(out);
  }

 private:
  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  int n_;
  fftw_plan plan_;
};

}  // namespace

std::vector<double> power_spectrum(const std::vector<double>& samples, int n) {
  require(n >= 2, "spectrum length must be >= 2");
  std::vector<double> frame(n, 0.0);
  std::copy_n(samples.begin(), std::min<std::size_t>(samples.size(), n), frame.begin());
  const RealFft fft(n);
  std::vector<double> out;
  fft.power(frame.data(), out);
  return out;
}

namespace {

Matrix mel_filterbank(const LogMelConfig& c) {
  const int n_bins = c.fft_size / 2 + 1;
  const double fmax = std::min(c.fmax_hz, c.sample_rate / 2.0);
  const double mel_lo = hz_to_mel(c.fmin_hz);
  const double mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(c.n_mels + 2);
  for (int i = 0; i < c.n_mels + 2; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (c.n_mels + 1));
  }
  Matrix fb = Matrix::Zero(c.n_mels, n_bins);
  for (int m = 0; m < c.n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * c.sample_rate / c.fft_size;
      if (f > lo && f < hi) {
        fb(m, k) = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      }
    }
  }
  return fb;
}

}  // namespace

std::vector<double> mel_center_frequencies(const LogMelConfig& c) {
  const double fmax = std::min(c.fmax_hz, c.sample_rate / 2.0);
  const double mel_lo = hz_to_mel(c.fmin_hz);
  const double mel_hi = hz_to_mel(fmax);
  std::vector<double> centers(c.n_mels);
  for (int m = 0; m < c.n_mels; ++m) {
    centers[m] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * (m + 1) / (c.n_mels + 1));
  }
  return centers;
}

FrameSequence logmel_frontend(const Waveform& w, const LogMelConfig& config) {
  require(w.is_mono(), "logmel_frontend requires mono audio");
  require(w.sample_rate() == config.sample_rate,
          "logmel_frontend expects " + std::to_string(config.sample_rate) +
              " Hz audio, got " + std::to_string(w.sample_rate()));
  const auto window = static_cast<std::size_t>(
      std::lround(config.window_ms * config.sample_rate / 1000.0));
  const auto hop = static_cast<std::size_t>(
      std::lround(config.hop_ms * config.sample_rate / 1000.0));
  require(window <= static_cast<std::size_t>(config.fft_size),
          "analysis window longer than fft_size");

  FrameSequence out;
  out.frame_rate = static_cast<double>(config.sample_rate) / static_cast<double>(hop);
  const auto& x = w.samples();
  if (x.size() < window) {
    out.frames = Matrix(0, config.n_mels);
    return out;
  }

  // One frame per hop; the final frames are zero-padded past the end.
  const std::size_t n_frames = x.size() / hop;
  std::vector<double> hann(window);
  for (std::size_t i = 0; i < window; ++i) {
    hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / window);
  }
  const Matrix fb = mel_filterbank(config);
  const RealFft fft(config.fft_size);

  out.frames.resize(static_cast<Eigen::Index>(n_frames), config.n_mels);
  std::vector<double> buf(config.fft_size);
  std::vector<double> spectrum;
  for (std::size_t f = 0; f < n_frames; ++f) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < window && start + i < x.size(); ++i) {
      buf[i] = x[start + i] * hann[i];
    }
    fft.power(buf.data(), spectrum);
    const Eigen::Map<const Vector> p(spectrum.data(), static_cast<Eigen::Index>(spectrum.size()));
    const Vector energies = fb * p;
    for (int m = 0; m < config.n_mels; ++m) {
      out.frames(static_cast<Eigen::Index>(f), m) =
          std::log(std::max(energies[m], config.energy_floor));
    }
  }
  return out;
}

DownsampledFeatures downsample_stack(const FrameSequence& f, int k) {
  require(k >= 1, "downsample factor k must be >= 1");
  const Eigen::Index n = f.n_frames() / k;
  const Eigen::Index d = f.dim();
  DownsampledFeatures z;
  z.k = k;
  z.token_rate = f.frame_rate / k;
  // Row-major storage makes k consecutive rows one contiguous k*d row.
  z.features = Eigen::Map<const Matrix>(f.frames.data(), n, k * d);
  return z;
}

Matrix unstack(const DownsampledFeatures& z) {
  const Eigen::Index d = z.features.cols() / z.k;
  return Eigen::Map<const Matrix>(z.features.data(), z.features.rows() * z.k, d);
}

ToyCorpusSpec make_toy_corpus_spec(TokenSequence content_tokens, int d_enc,
                                   int d_llm, std::uint64_t seed) {
  require(!content_tokens.empty(), "toy corpus needs at least one content token");
  require(d_enc >= 1 && d_llm >= 1, "toy corpus dimensions must be positive");
  ToyCorpusSpec spec;
  spec.content_tokens = std::move(content_tokens);
  Rng rng = make_rng(seed, "signature");
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(d_llm)));
  spec.signature.resize(d_enc, d_llm);
  for (Eigen::Index i = 0; i < spec.signature.size(); ++i) {
    spec.signature.data()[i] = gauss(rng);
  }
  return spec;
}

ToyUtterance synth_utterance(const Matrix& embeddings, const ToyCorpusSpec& spec,
                             int length, RateDistribution rate, double noise_sigma,
                             std::uint64_t seed) {
  require(length >= 1, "synth_utterance length must be >= 1");
  require(rate.mean >= 1, "frames-per-token mean must be >= 1");
  require(rate.spread >= 0 && rate.spread < rate.mean,
          "frames-per-token spread must satisfy 0 <= spread < mean");
  require(embeddings.cols() == spec.signature.cols(),
          "signature width does not match the embedding dimension");
  require(noise_sigma >= 0.0, "noise_sigma must be non-negative");

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, spec.content_tokens.size() - 1);
  std::uniform_int_distribution<int> frames_dist(rate.mean - rate.spread,
                                                 rate.mean + rate.spread);
  std::normal_distribution<double> noise(0.0, 1.0);

  ToyUtterance u;
  u.seed = seed;
  for (int i = 0; i < length; ++i) {
    u.reference_tokens.push_back(spec.content_tokens[pick(rng)]);
    u.frames_per_token.push_back(frames_dist(rng));
  }
  int total = 0;
  for (int m : u.frames_per_token) total += m;

  u.frames.frame_rate = spec.frame_rate;
  u.frames.frames.resize(total, spec.d_enc());
  Eigen::Index row = 0;
  for (int i = 0; i < length; ++i) {
    const TokenId t = u.reference_tokens[i];
    require(t >= 0 && t < embeddings.rows(), "content token outside the embedding table");
    const RowVector clean = (spec.signature * embeddings.row(t).transpose()).transpose();
    for (int m = 0; m < u.frames_per_token[i]; ++m, ++row) {
      u.frames.frames.row(row) = clean;
      if (noise_sigma > 0.0) {
        for (Eigen::Index c = 0; c < clean.size(); ++c) {
          u.frames.frames(row, c) += noise_sigma * noise(rng);
        }
      }
    }
  }
  return u;
}

Waveform synth_tone_waveform(const TokenSequence& tokens,
                             const std::vector<int>& frames_per_token,
                             const TokenSequence& content_tokens, int sample_rate,
                             int hop_samples) {
  require(tokens.size() == frames_per_token.size(),
          "tokens and frames_per_token must have equal length");
  std::vector<double> samples;
  double phase1 = 0.0, phase2 = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto it = std::find(content_tokens.begin(), content_tokens.end(), tokens[i]);
    require(it != content_tokens.end(), "tone synthesis of a non-content token");
    const auto index = static_cast<double>(it - content_tokens.begin());
    const double f1 = 250.0 + 140.0 * index;
    const double f2 = 1.5 * f1 + 90.0;
    const int n = frames_per_token[i] * hop_samples;
    for (int s = 0; s < n; ++s) {
      samples.push_back(0.3 * std::sin(phase1) + 0.2 * std::sin(phase2));
      phase1 += 2.0 * std::numbers::pi * f1 / sample_rate;
      phase2 += 2.0 * std::numbers::pi * f2 / sample_rate;
    }
  }
  return Waveform(std::move(samples), sample_rate, 1);
}

std::vector<std::uint8_t> encode_features(const FrameSequence& f) {
  std::vector<std::uint8_t> out;
  auto put = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(kFeatureMagic);
  put(static_cast<std::uint32_t>(f.n_frames()));
  put(static_cast<std::uint32_t>(f.dim()));
  put(std::bit_cast<std::uint32_t>(static_cast<float>(f.frame_rate)));
  for (Eigen::Index i = 0; i < f.frames.size(); ++i) {
    put(std::bit_cast<std::uint32_t>(static_cast<float>(f.frames.data()[i])));
  }
  return out;
}

FrameSequence decode_features(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16) throw FormatError("feature file: truncated header");
  auto word = [&bytes](std::size_t i) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t{bytes[4 * i + b]} << (8 * b);
    return v;
  };
  if (word(0) != kFeatureMagic) throw FormatError("feature file: bad magic");
  const std::uint32_t n = word(1), d = word(2);
  const float rate = std::bit_cast<float>(word(3));
  if (!(rate > 0.0f)) throw FormatError("feature file: non-positive frame rate");
  const std::size_t count = static_cast<std::size_t>(n) * d;
  if (bytes.size() != 16 + 4 * count) {
    throw FormatError("feature file: payload size does not match n_frames x d_enc");
  }
  FrameSequence f;
  f.frame_rate = rate;
  f.frames.resize(n, d);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::bit_cast<float>(word(4 + i));
    if (!std::isfinite(v)) throw FormatError("feature file: non-finite value");
    f.frames.data()[i] = v;
  }
  return f;
}

void write_feature_file(const std::string& path, const FrameSequence& f) {
  const auto bytes = encode_features(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create feature file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path);
}

FrameSequence read_feature_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_features(bytes);
}

}  // namespace slamkit
