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

#include "slamkit/params.hpp"

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

std::uint64_t block_checksum(const Matrix& m) {
  return fnv1a64(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
}

std::uint64_t parameter_checksum(const std::vector<ConstParamRef>& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : params) {
    h = fnv1a64(p.value->data(), static_cast<std::size_t>(p.value->size()) * sizeof(double), h);
  }
  return h;
}

std::vector<Matrix> zeros_like(const std::vector<ConstParamRef>& params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(Matrix::Zero(p.value->rows(), p.value->cols()));
  return out;
}

std::size_t parameter_count(const std::vector<ConstParamRef>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += static_cast<std::size_t>(p.value->size());
  return n;
}

Vector flatten(const std::vector<ConstParamRef>& params) {
  Vector flat(static_cast<Eigen::Index>(parameter_count(params)));
  Eigen::Index at = 0;
  for (const auto& p : params) {
    flat.segment(at, p.value->size()) =
        Eigen::Map<const Vector>(p.value->data(), p.value->size());
    at += p.value->size();
  }
  return flat;
}

Vector flatten(const std::vector<Matrix>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.size();
  Vector flat(n);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    flat.segment(at, b.size()) = Eigen::Map<const Vector>(b.data(), b.size());
    at += b.size();
  }
  return flat;
}

void unflatten(const Vector& flat, const std::vector<ParamRef>& params) {
  Eigen::Index at = 0;
  for (const auto& p : params) {
    require(at + p.value->size() <= flat.size(), "unflatten: vector too short");
    Eigen::Map<Vector>(p.value->data(), p.value->size()) = flat.segment(at, p.value->size());
    at += p.value->size();
  }
  require(at == flat.size(), "unflatten: vector too long");
}

std::vector<ConstParamRef> const_refs(const std::vector<ParamRef>& params) {
  std::vector<ConstParamRef> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back({p.name, p.value});
  return out;
}

}  // namespace slamkit
