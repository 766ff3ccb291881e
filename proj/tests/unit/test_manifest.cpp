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

#include "slamkit/error.hpp"
#include "slamkit/manifest.hpp"

namespace slamkit {
namespace {

std::string error_of(std::string_view text) {
  try {
    parse_manifest_text(text, "/data", "m.jsonl");
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(Manifest, TwoValidLines) {
  const Manifest m = parse_manifest_text(
      "{\"utterance_id\":\"a\",\"audio_path\":\"a.wav\",\"reference\":\"hi\"}\n"
      "{\"utterance_id\":\"b\",\"feature_path\":\"/abs/b.skft\",\"reference\":\"yo\",\"duration_s\":1.5}\n",
      "/data");
  ASSERT_EQ(m.records.size(), 2u);
  EXPECT_EQ(*m.records[0].audio_path, "/data/a.wav");
  EXPECT_EQ(*m.records[1].feature_path, "/abs/b.skft");
  EXPECT_DOUBLE_EQ(*m.records[1].duration_s, 1.5);
  EXPECT_EQ(m.records[1].line, 2);
}

TEST(Manifest, DuplicateIdCitesBothLines) {
  std::string text;
  for (int i = 1; i <= 9; ++i) {
    const std::string id = (i == 3 || i == 9) ? "dup" : "u" + std::to_string(i);
    text += "{\"utterance_id\":\"" + id + "\",\"audio_path\":\"x.wav\",\"reference\":\"r\"}\n";
  }
  const std::string e = error_of(text);
  EXPECT_NE(e.find("lines 3 and 9"), std::string::npos) << e;
  EXPECT_NE(e.find("dup"), std::string::npos);
}

TEST(Manifest, ExactlyOnePathAndKnownFields) {
  EXPECT_NE(error_of("{\"utterance_id\":\"a\",\"audio_path\":\"a\",\"feature_path\":\"b\",\"reference\":\"r\"}")
                .find("m.jsonl:1"),
            std::string::npos);
  EXPECT_FALSE(error_of("{\"utterance_id\":\"a\",\"reference\":\"r\"}").empty());
  EXPECT_FALSE(error_of("{\"utterance_id\":\"a\",\"audio_path\":\"a\"}").empty());
  EXPECT_FALSE(error_of("{\"utterance_id\":\"a\",\"audio_path\":\"a\",\"reference\":\"r\",\"x\":1}").empty());
  EXPECT_FALSE(error_of("not json").empty());
  EXPECT_FALSE(error_of("{\"utterance_id\":\"a,b\",\"audio_path\":\"a\",\"reference\":\"r\"}").empty());
}

TEST(Manifest, BlankLinesAreSkippedAndLinesRoundTrip) {
  ManifestRecord r{"u1", std::nullopt, std::string("/f/u1.skft"), "w09 w10", 0.3, 0};
  const Manifest m = parse_manifest_text("\n" + manifest_line(r) + "\n\n", "/");
  ASSERT_EQ(m.records.size(), 1u);
  EXPECT_EQ(m.records[0].line, 2);
  EXPECT_EQ(m.records[0].reference, "w09 w10");
  EXPECT_EQ(*m.records[0].feature_path, "/f/u1.skft");
}

TEST(Manifest, MissingFileIsIo) { EXPECT_THROW(parse_manifest("/no/such/manifest.jsonl"), IoError); }

}  // namespace
}  // namespace slamkit
