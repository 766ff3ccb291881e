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

#include "slamkit/audio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "slamkit/error.hpp"

namespace slamkit {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void seek(std::size_t pos) { pos_ = std::min(pos, bytes_.size()); }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::string hex16(std::uint16_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

Waveform::Waveform(std::vector<double> samples, int sample_rate, int channel_count)
    : samples_(std::move(samples)),
      sample_rate_(sample_rate),
      channel_count_(channel_count) {
  require(sample_rate_ > 0, "waveform sample_rate must be positive");
  require(channel_count_ > 0, "waveform channel_count must be positive");
  require(samples_.size() % static_cast<std::size_t>(channel_count_) == 0,
          "waveform sample count is not a multiple of channel_count");
  for (double s : samples_) {
    require(std::isfinite(s), "waveform contains a non-finite sample");
  }
}

Waveform read_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12) throw FormatError("wav: missing RIFF header");
  ByteReader r(bytes);
  if (r.tag() != "RIFF") throw FormatError("wav: missing RIFF chunk id");
  r.u32();  // riff size; trust the chunk walk instead
  if (r.tag() != "WAVE") throw FormatError("wav: missing WAVE form type");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  while (r.remaining() >= 8) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (size > r.remaining()) {
      // A truncated trailing data chunk is common with streamed writers.
      if (id != "data") throw FormatError("wav: chunk '" + id + "' overruns the file");
    }
    const std::size_t body = std::min<std::size_t>(size, r.remaining());
    const std::size_t start = r.position();
    if (id == "fmt ") {
      if (body < 16) throw FormatError("wav: invalid 'fmt ' chunk (too short)");
      format = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();  // byte rate
      r.u16();  // block align
      bits = r.u16();
      if (format == kFormatExtensible) {
        if (body < 40) throw FormatError("wav: invalid extensible 'fmt ' chunk");
        r.u16();  // cb size
        r.u16();  // valid bits
        r.u32();  // channel mask
        format = r.u16();  // first two bytes of the sub-format GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      data = r.take(body);
      have_data = true;
    }
    r.seek(start + body + (body & 1U));
  }

  if (!have_fmt) throw FormatError("wav: missing 'fmt ' chunk");
  if (!have_data) throw FormatError("wav: missing 'data' chunk");
  if (channels == 0) throw FormatError("wav: invalid 'fmt ' chunk (zero channels)");
  if (rate == 0) throw FormatError("wav: invalid 'fmt ' chunk (zero sample rate)");

  std::vector<double> samples;
  if (format == kFormatPcm && bits == 16) {
    const std::size_t n = data.size() / 2;
    samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
      samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t n = data.size() / 4;
    samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t u = 0;
      for (int b = 0; b < 4; ++b) u |= std::uint32_t{data[4 * i + b]} << (8 * b);
      samples[i] = static_cast<double>(std::bit_cast<float>(u));
    }
  } else {
    throw UnsupportedError("wav: unsupported encoding (codec tag " + hex16(format) +
                           ", " + std::to_string(bits) + " bits)");
  }
  samples.resize(samples.size() - samples.size() % channels);
  return Waveform(std::move(samples), static_cast<int>(rate), channels);
}

WavWriteResult write_wav(const Waveform& w, WavEncoding encoding) {
  WavWriteResult result;
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint16_t block = static_cast<std::uint16_t>(w.channel_count() * bits / 8);
  const auto data_size = static_cast<std::uint32_t>(w.samples().size() * bits / 8);

  auto& out = result.bytes;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, static_cast<std::uint16_t>(w.channel_count()));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate()));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate()) * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);

  for (double s : w.samples()) {
    if (pcm) {
      double clipped = s;
      if (s > 1.0 || s < -1.0) {
        ++result.saturated;
        clipped = std::clamp(s, -1.0, 1.0);
      }
      // Scaling by 32768 keeps k/32768 inputs exact; +1.0 lands on 32767.
      const auto v = static_cast<std::int16_t>(
          std::clamp(std::lround(clipped * 32768.0), -32768L, 32767L));
      put_u16(out, static_cast<std::uint16_t>(v));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(s)));
    }
  }
  return result;
}

Waveform read_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open wav file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return read_wav(bytes);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path + ")");
  }
}

std::size_t write_wav_file(const std::string& path, const Waveform& w,
                           WavEncoding encoding) {
  const auto result = write_wav(w, encoding);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create wav file: " + path);
  out.write(reinterpret_cast<const char*>(result.bytes.data()),
            static_cast<std::streamsize>(result.bytes.size()));
  if (!out) throw IoError("write failed: " + path);
  return result.saturated;
}

Waveform downmix(const Waveform& w) {
  if (w.is_mono()) return w;
  const int c = w.channel_count();
  std::vector<double> mono(w.frame_count());
  for (std::size_t i = 0; i < mono.size(); ++i) {
    double sum = 0.0;
    for (int ch = 0; ch < c; ++ch) sum += w.samples()[i * c + ch];
    mono[i] = sum / c;
  }
  return Waveform(std::move(mono), w.sample_rate(), 1);
}

Waveform resample(const Waveform& w, int target_rate) {
  require(w.is_mono(), "resample requires mono input; downmix first");
  require(target_rate > 0, "resample target_rate must be positive");
  if (target_rate == w.sample_rate()) return w;

  const auto& in = w.samples();
  const double ratio = static_cast<double>(target_rate) / w.sample_rate();
  const auto out_len = static_cast<std::size_t>(std::llround(in.size() * ratio));
  // Cutoff relative to the input Nyquist; below 1 only when downsampling.
  const double cutoff = std::min(1.0, ratio);
  // 32 taps at the (possibly lowered) cutoff, i.e. 16 zero crossings a side.
  const double half_width = 16.0 / cutoff;
  const auto n_in = static_cast<std::ptrdiff_t>(in.size());

  std::vector<double> out(out_len);
  for (std::size_t j = 0; j < out_len; ++j) {
    const double x = static_cast<double>(j) / ratio;
    const auto lo = static_cast<std::ptrdiff_t>(std::ceil(x - half_width));
    const auto hi = static_cast<std::ptrdiff_t>(std::floor(x + half_width));
    double acc = 0.0;
    for (std::ptrdiff_t n = std::max<std::ptrdiff_t>(lo, 0);
         n <= std::min(hi, n_in - 1); ++n) {
      const double d = x - static_cast<double>(n);
      const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * d / half_width));
      acc += in[n] * cutoff * sinc(cutoff * d) * window;
    }
    out[j] = acc;
  }
  return Waveform(std::move(out), target_rate, 1);
}

double mean_power(std::span<const double> samples) {
  require(!samples.empty(), "mean_power of an empty waveform");
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return acc / static_cast<double>(samples.size());
}

double mean_power(const Waveform& w) { return mean_power(std::span(w.samples())); }

}  // namespace slamkit
