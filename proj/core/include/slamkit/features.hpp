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
#include <string>
#include <vector>

#include "slamkit/audio.hpp"
#include "slamkit/linalg.hpp"

namespace slamkit {

// Encoder-rate acoustic frames, one row per frame.
struct FrameSequence {
  Matrix frames;
  double frame_rate = 50.0;

  Eigen::Index n_frames() const { return frames.rows(); }
  Eigen::Index dim() const { return frames.cols(); }
  double duration_seconds() const {
    return frame_rate > 0 ? static_cast<double>(frames.rows()) / frame_rate : 0.0;
  }
};

// Z: row i is frames i*k .. i*k+k-1 laid end to end.
struct DownsampledFeatures {
  Matrix features;
  int k = 5;
  double token_rate = 10.0;

  Eigen::Index rows() const { return features.rows(); }
};

struct LogMelConfig {
  int sample_rate = 16000;
  double window_ms = 25.0;
  double hop_ms = 20.0;
  int fft_size = 512;
  int n_mels = 40;
  double fmin_hz = 20.0;
  double fmax_hz = 8000.0;
  double energy_floor = 1e-10;
};

FrameSequence logmel_frontend(const Waveform& w, const LogMelConfig& config = {});

// |X_k|^2, k = 0..n/2, of the first n samples (zero-padded when shorter).
std::vector<double> power_spectrum(const std::vector<double>& samples, int n);

// Center frequencies (Hz) of the triangular mel filters used by the frontend.
std::vector<double> mel_center_frequencies(const LogMelConfig& config);

DownsampledFeatures downsample_stack(const FrameSequence& f, int k);

// Inverse of downsample_stack for the retained frames.
Matrix unstack(const DownsampledFeatures& z);

// Fixed per-corpus ingredients of synthetic utterances: the content-token
// subset, the d_enc x d_llm signature matrix S, and the encoder frame rate.
struct ToyCorpusSpec {
  TokenSequence content_tokens;
  Matrix signature;
  double frame_rate = 50.0;

  int d_enc() const { return static_cast<int>(signature.rows()); }
};

ToyCorpusSpec make_toy_corpus_spec(TokenSequence content_tokens, int d_enc,
                                   int d_llm, std::uint64_t seed);

struct RateDistribution {
  int mean = 5;
  int spread = 0;
};

struct ToyUtterance {
  FrameSequence frames;
  TokenSequence reference_tokens;
  std::vector<int> frames_per_token;
  std::uint64_t seed = 0;
};

// `embeddings` is the V x d_llm input table of the frozen LM. Each token t
// contributes m_t frames of S*embed(t) + N(0, noise_sigma^2).
ToyUtterance synth_utterance(const Matrix& embeddings, const ToyCorpusSpec& spec,
                             int length, RateDistribution rate, double noise_sigma,
                             std::uint64_t seed);

// Renders a token sequence as a tone sequence: token index j in the content
// set sounds as a two-partial tone for m_t * hop samples. Used to exercise the
// audio path (frontend, tempo, noise) with a self-contained corpus.
Waveform synth_tone_waveform(const TokenSequence& tokens,
                             const std::vector<int>& frames_per_token,
                             const TokenSequence& content_tokens,
                             int sample_rate = 16000, int hop_samples = 320);

// External-feature file: header of four little-endian 32-bit words
// (magic "SKFT", n_frames, d_enc, frame_rate as IEEE float) followed by
// row-major float32 values.
inline constexpr std::uint32_t kFeatureMagic = 0x54464B53;  // "SKFT"

std::vector<std::uint8_t> encode_features(const FrameSequence& f);
FrameSequence decode_features(const std::vector<std::uint8_t>& bytes);
void write_feature_file(const std::string& path, const FrameSequence& f);
FrameSequence read_feature_file(const std::string& path);

}  // namespace slamkit
