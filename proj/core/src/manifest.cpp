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

#include "slamkit/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slamkit/error.hpp"

namespace slamkit {

namespace {

using nlohmann::json;

std::string resolve(const std::string& base, const std::string& p) {
  if (base.empty() || std::filesystem::path(p).is_absolute()) return p;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open manifest " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ValidationError(source + ":" + std::to_string(line) + ": " + msg);
}

json parse_line(const std::string& text, const std::string& source, int line) {
  try {
    json j = json::parse(text);
    if (!j.is_object()) fail(source, line, "record is not a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    fail(source, line, std::string("malformed JSON: ") + e.what());
  }
}

std::string string_field(const json& j, const char* key, const std::string& source, int line) {
  if (!j.contains(key)) fail(source, line, std::string("missing field '") + key + "'");
  if (!j.at(key).is_string()) fail(source, line, std::string("field '") + key + "' must be a string");
  return j.at(key).get<std::string>();
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    ++line;
    std::string s(text.substr(pos, end - pos));
    if (!s.empty() && s.back() == '\r') s.pop_back();
    if (s.find_first_not_of(" \t") != std::string::npos) f(s, line);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

}  // namespace

Manifest parse_manifest_text(std::string_view text, const std::string& base_dir,
                             const std::string& source) {
  static const std::set<std::string> known = {"utterance_id", "audio_path", "feature_path",
                                              "reference", "duration_s"};
  Manifest m;
  std::map<std::string, int> seen;
  for_each_line(text, [&](const std::string& s, int line) {
    const json j = parse_line(s, source, line);
    for (const auto& [k, _] : j.items()) {
      if (!known.count(k)) fail(source, line, "unknown field '" + k + "'");
    }
    ManifestRecord r;
    r.line = line;
    r.utterance_id = string_field(j, "utterance_id", source, line);
    if (r.utterance_id.empty()) fail(source, line, "utterance_id is empty");
    if (r.utterance_id.find_first_of(",\"\n") != std::string::npos) {
      fail(source, line, "utterance_id must not contain commas, quotes or newlines");
    }
    r.reference = string_field(j, "reference", source, line);
    const bool audio = j.contains("audio_path");
    const bool feats = j.contains("feature_path");
    if (audio == feats) {
      fail(source, line, "record must have exactly one of audio_path or feature_path");
    }
    if (audio) r.audio_path = resolve(base_dir, string_field(j, "audio_path", source, line));
    if (feats) r.feature_path = resolve(base_dir, string_field(j, "feature_path", source, line));
    if (j.contains("duration_s")) {
      if (!j.at("duration_s").is_number()) fail(source, line, "duration_s must be a number");
      r.duration_s = j.at("duration_s").get<double>();
      if (!(*r.duration_s >= 0.0)) fail(source, line, "duration_s must be >= 0");
    }
    const auto [it, inserted] = seen.emplace(r.utterance_id, line);
    if (!inserted) {
      throw ValidationError(source + ": duplicate utterance_id '" + r.utterance_id +
                            "' on lines " + std::to_string(it->second) + " and " +
                            std::to_string(line));
    }
    m.records.push_back(std::move(r));
  });
  return m;
}

Manifest parse_manifest(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_manifest_text(read_text(path), base, path);
}

std::string manifest_line(const ManifestRecord& r) {
  json j;
  j["utterance_id"] = r.utterance_id;
  if (r.audio_path) j["audio_path"] = *r.audio_path;
  if (r.feature_path) j["feature_path"] = *r.feature_path;
  j["reference"] = r.reference;
  if (r.duration_s) j["duration_s"] = *r.duration_s;
  return j.dump();
}

void write_manifest(const std::string& path, const Manifest& m) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path + " for writing");
  for (const auto& r : m.records) f << manifest_line(r) << '\n';
  if (!f) throw IoError("failed writing " + path);
}

std::vector<NoiseRecord> parse_noise_manifest(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  std::vector<NoiseRecord> out;
  for_each_line(read_text(path), [&](const std::string& s, int line) {
    const json j = parse_line(s, path, line);
    for (const auto& [k, _] : j.items()) {
      if (k != "noise_class" && k != "audio_path") fail(path, line, "unknown field '" + k + "'");
    }
    NoiseRecord r{NoiseClass::kSynthetic, "", line};
    try {
      r.noise_class = parse_noise_class(string_field(j, "noise_class", path, line));
    } catch (const ValidationError& e) {
      fail(path, line, e.what());
    }
    r.audio_path = resolve(base, string_field(j, "audio_path", path, line));
    out.push_back(std::move(r));
  });
  return out;
}

}  // namespace slamkit
