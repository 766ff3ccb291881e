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
#include <vector>

#include "slamkit/linalg.hpp"
#include "slamkit/params.hpp"

namespace slamkit {

// Low-rank delta (alpha / r) * B * A on a d_out x d_in base weight.
struct LoraAdapter {
  Matrix a;  // r x d_in
  Matrix b;  // d_out x r
  double alpha = 16.0;

  // A ~ N(0, sigma^2), B = 0, so the adapted layer starts as the base layer.
  static LoraAdapter init(int d_in, int d_out, int rank, double alpha, std::uint64_t seed,
                          double sigma = 0.02);

  int rank() const { return static_cast<int>(a.rows()); }
  int d_in() const { return static_cast<int>(a.cols()); }
  int d_out() const { return static_cast<int>(b.rows()); }
  double scale() const { return alpha / rank(); }
};

// (W + (alpha/r) B A) x without forming the sum.
Vector lora_forward(const Matrix& base_weight, const LoraAdapter& adapter, const Vector& x);
Matrix lora_merge(const Matrix& base_weight, const LoraAdapter& adapter);

// Row-batched form used inside the transformer: Y = X W^T + s (X A^T) B^T.
// When `xa` is given it receives X A^T for the backward pass.
Matrix lora_apply_rows(const Matrix& x, const Matrix& base_weight, const LoraAdapter* adapter,
                       Matrix* xa = nullptr);

// Adapters on the query and value projections of every transformer layer.
struct LoraSet {
  std::vector<LoraAdapter> query;
  std::vector<LoraAdapter> value;

  static LoraSet init(int n_layers, int d_model, int rank, double alpha, std::uint64_t seed);

  bool empty() const { return query.empty(); }
  std::vector<ParamRef> params();
  std::vector<ConstParamRef> params() const;
};

}  // namespace slamkit
