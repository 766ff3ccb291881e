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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slamkit/perturb.hpp"

namespace slamkit {

struct ManifestRecord {
  std::string utterance_id;
  std::optional<std::string> audio_path;
  std::optional<std::string> feature_path;
  std::string reference;
  std::optional<double> duration_s;
  int line = 0;  // 1-based source line
};

// One JSON object per line:
//   {"utterance_id": "...", "audio_path" | "feature_path": "...",
//    "reference": "...", "duration_s": 1.5}
// Blank lines are ignored. Relative paths resolve against the manifest's
// directory.
struct Manifest {
  std::vector<ManifestRecord> records;
};

Manifest parse_manifest(const std::string& path);
Manifest parse_manifest_text(std::string_view text, const std::string& base_dir = "",
                             const std::string& source = "manifest");

void write_manifest(const std::string& path, const Manifest& m);
std::string manifest_line(const ManifestRecord& r);

// Noise manifest: {"noise_class": "babble"|"music"|"synthetic", "audio_path": "..."}.
struct NoiseRecord {
  NoiseClass noise_class;
  std::string audio_path;
  int line = 0;
};

std::vector<NoiseRecord> parse_noise_manifest(const std::string& path);

}  // namespace slamkit
