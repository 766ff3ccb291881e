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

#include "slamkit/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'S', 'K', 'C', 'K'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) {
    std::uint8_t b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    bytes(b, 8);
  }
  void f64(double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    u64(v);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& out() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* p, std::size_t n) : p_(p), n_(n) {}
  void need(std::size_t k) const {
    if (pos_ + k > n_) throw FormatError("checkpoint truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() {
    const std::uint64_t v = u64();
    double d;
    std::memcpy(&d, &v, 8);
    return d;
  }
  std::string str() {
    const std::uint32_t len = u32();
    need(len);
    std::string s(reinterpret_cast<const char*>(p_ + pos_), len);
    pos_ += len;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::uint8_t* p_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

json parse_meta(const Checkpoint& c, const std::string& expected_kind) {
  if (c.kind != expected_kind) {
    throw FormatError("checkpoint kind is '" + c.kind + "', expected '" + expected_kind + "'");
  }
  try {
    return json::parse(c.meta_json);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
}

template <typename T>
T meta_get(const json& meta, const char* key) {
  if (!meta.contains(key)) throw FormatError(std::string("checkpoint metadata lacks '") + key + "'");
  try {
    return meta.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("checkpoint metadata field '") + key + "' has the wrong type");
  }
}

void take(const Checkpoint& c, const std::string& name, Matrix& dst) {
  const Matrix& src = c.block(name);
  if (dst.size() != 0 && (dst.rows() != src.rows() || dst.cols() != src.cols())) {
    throw FormatError("checkpoint block " + name + " has an unexpected shape");
  }
  dst = src;
}

Checkpoint from_refs(std::string kind, json meta, const std::vector<ConstParamRef>& refs) {
  Checkpoint c;
  c.kind = std::move(kind);
  c.meta_json = meta.dump();
  for (const auto& r : refs) c.blocks.emplace_back(r.name, *r.value);
  return c;
}

}  // namespace

const Matrix& Checkpoint::block(const std::string& name) const {
  for (const auto& [n, m] : blocks) {
    if (n == name) return m;
  }
  throw FormatError("checkpoint has no block named " + name);
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& c) {
  Writer w;
  w.bytes(kMagic, 4);
  w.u32(Checkpoint::kVersion);
  w.str(c.kind);
  w.str(c.meta_json);
  w.u32(static_cast<std::uint32_t>(c.blocks.size()));
  for (const auto& [name, m] : c.blocks) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
  }
  for (const auto& [name, m] : c.blocks) {
    for (Eigen::Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
  }
  w.u64(fnv1a64(w.out().data(), w.out().size()));
  return std::move(w.out());
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not a slamkit checkpoint (bad magic)");
  }
  const std::size_t body = bytes.size() - 8;
  Reader trailer(bytes.data() + body, 8);
  if (trailer.u64() != fnv1a64(bytes.data(), body)) {
    throw FormatError("checkpoint checksum mismatch");
  }
  Reader r(bytes.data(), body);
  r.need(4);
  (void)r.u32();  // magic
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion) {
    throw UnsupportedError("checkpoint version " + std::to_string(version) + " is not supported");
  }
  Checkpoint c;
  c.kind = r.str();
  c.meta_json = r.str();
  const std::uint32_t n = r.u32();
  std::vector<std::tuple<std::string, std::uint32_t, std::uint32_t>> table;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = r.str();
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    table.emplace_back(std::move(name), rows, cols);
  }
  for (auto& [name, rows, cols] : table) {
    Matrix m(rows, cols);
    r.need(static_cast<std::size_t>(rows) * cols * 8);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
    c.blocks.emplace_back(std::move(name), std::move(m));
  }
  if (r.pos() != body) throw FormatError("checkpoint has trailing bytes");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  const auto bytes = encode_checkpoint(c);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

Checkpoint to_checkpoint(const ToyLM& lm) {
  const LmConfig& c = lm.config();
  json meta = {{"vocab_size", c.vocab_size},
               {"d_model", c.d_model},
               {"n_layers", c.n_layers},
               {"n_heads", c.n_heads},
               {"d_ff", c.d_ff},
               {"max_seq_len", c.max_seq_len},
               {"vocab", lm.vocab().kind() == VocabKind::kSynthetic ? "synthetic" : "characters"},
               {"frozen", lm.frozen()},
               {"prompt_template", std::string(kPromptTemplate)}};
  return from_refs("lm", meta, lm.weights().refs());
}

ToyLM lm_from_checkpoint(const Checkpoint& ckpt) {
  const json meta = parse_meta(ckpt, "lm");
  LmConfig c;
  c.vocab_size = meta_get<int>(meta, "vocab_size");
  c.d_model = meta_get<int>(meta, "d_model");
  c.n_layers = meta_get<int>(meta, "n_layers");
  c.n_heads = meta_get<int>(meta, "n_heads");
  c.d_ff = meta_get<int>(meta, "d_ff");
  c.max_seq_len = meta_get<int>(meta, "max_seq_len");
  const auto vocab_kind = meta_get<std::string>(meta, "vocab");
  Vocabulary vocab = vocab_kind == "characters" ? Vocabulary::characters()
                                                : Vocabulary::synthetic(c.vocab_size);
  // Shapes come from a freshly initialized model; values from the file.
  ToyLM shape(c, vocab, 0);
  LmWeights w = shape.weights();
  for (auto& r : w.refs()) take(ckpt, r.name, *r.value);
  ToyLM lm(c, std::move(vocab), std::move(w));
  if (meta.value("frozen", false)) lm.freeze();
  return lm;
}

Checkpoint to_checkpoint(const Projector& p, int k) {
  json meta = {{"d_z", p.d_in()},     {"hidden", p.hidden()}, {"d_llm", p.d_out()},
               {"k", k},              {"trained_epochs", p.trained_epochs}};
  return from_refs("projector", meta, p.params());
}

Projector projector_from_checkpoint(const Checkpoint& ckpt, int* k) {
  const json meta = parse_meta(ckpt, "projector");
  Projector p = Projector::zeros(meta_get<int>(meta, "d_z"), meta_get<int>(meta, "hidden"),
                                 meta_get<int>(meta, "d_llm"));
  for (auto& r : p.params()) take(ckpt, r.name, *r.value);
  p.trained_epochs = meta_get<int>(meta, "trained_epochs");
  if (k != nullptr) *k = meta_get<int>(meta, "k");
  return p;
}

Checkpoint to_checkpoint(const LoraSet& lora) {
  const int rank = lora.empty() ? 0 : lora.query.front().rank();
  const double alpha = lora.empty() ? 0.0 : lora.query.front().alpha;
  json meta = {{"n_layers", static_cast<int>(lora.query.size())}, {"rank", rank}, {"alpha", alpha}};
  return from_refs("lora", meta, lora.params());
}

LoraSet lora_from_checkpoint(const Checkpoint& ckpt) {
  const json meta = parse_meta(ckpt, "lora");
  const int n = meta_get<int>(meta, "n_layers");
  const double alpha = meta_get<double>(meta, "alpha");
  LoraSet s;
  s.query.resize(n);
  s.value.resize(n);
  for (int l = 0; l < n; ++l) {
    s.query[l].alpha = alpha;
    s.value[l].alpha = alpha;
  }
  for (auto& r : s.params()) take(ckpt, r.name, *r.value);
  return s;
}

Checkpoint to_checkpoint(const CtcHead& head) {
  json meta = {{"blank", kCtcBlank},
               {"n_classes", head.n_classes()},
               {"d_enc", head.d_enc()},
               {"trained_epochs", head.trained_epochs}};
  return from_refs("ctc", meta, head.params());
}

CtcHead ctc_head_from_checkpoint(const Checkpoint& ckpt) {
  const json meta = parse_meta(ckpt, "ctc");
  if (meta_get<int>(meta, "blank") != kCtcBlank) {
    throw UnsupportedError("checkpoint uses a blank index other than 0");
  }
  CtcHead h;
  for (auto& r : h.params()) take(ckpt, r.name, *r.value);
  h.trained_epochs = meta_get<int>(meta, "trained_epochs");
  return h;
}

}  // namespace slamkit
