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

#include "slamkit/linalg.hpp"

namespace slamkit {

// Named view of one parameter block. Blocks are always matrices; bias and
// gain vectors are stored as 1 x n.
struct ParamRef {
  std::string name;
  Matrix* value;
};

struct ConstParamRef {
  std::string name;
  const Matrix* value;
};

// FNV-1a over the little-endian bytes of every block, in order.
std::uint64_t parameter_checksum(const std::vector<ConstParamRef>& params);
std::uint64_t block_checksum(const Matrix& m);

// Zeroed matrices shaped like `params`.
std::vector<Matrix> zeros_like(const std::vector<ConstParamRef>& params);

std::size_t parameter_count(const std::vector<ConstParamRef>& params);

// Flatten / scatter helpers for finite-difference checks.
Vector flatten(const std::vector<ConstParamRef>& params);
Vector flatten(const std::vector<Matrix>& blocks);
void unflatten(const Vector& flat, const std::vector<ParamRef>& params);

std::vector<ConstParamRef> const_refs(const std::vector<ParamRef>& params);

}  // namespace slamkit
