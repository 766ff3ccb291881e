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
#include <random>
#include <string_view>

namespace slamkit {

using Rng = std::mt19937_64;

// 64-bit FNV-1a over a byte range; also used for checkpoint checksums.
std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t state = 0xcbf29ce484222325ULL);

// Derives an independent seed for a named substream ("corpus", "init",
// "batch-order", "noise-offset", ...) so that consumers never share a
// generator.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name,
                             std::uint64_t index);

inline Rng make_rng(std::uint64_t seed, std::string_view name) {
  return Rng(substream_seed(seed, name));
}

}  // namespace slamkit
