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

#include "slamkit/lora.hpp"

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

namespace {

void check_shapes(const Matrix& base, const LoraAdapter& ad) {
  require(ad.rank() >= 1, "LoRA rank must be >= 1");
  require(ad.b.cols() == ad.rank(), "LoRA B must have r columns");
  require(base.rows() == ad.d_out() && base.cols() == ad.d_in(),
          "LoRA adapter shape does not match the base weight");
}

}  // namespace

LoraAdapter LoraAdapter::init(int d_in, int d_out, int rank, double alpha,
                              std::uint64_t seed, double sigma) {
  require(rank >= 1, "LoRA rank must be >= 1");
  LoraAdapter ad;
  ad.alpha = alpha;
  ad.a.resize(rank, d_in);
  ad.b = Matrix::Zero(d_out, rank);
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  for (Eigen::Index i = 0; i < ad.a.size(); ++i) ad.a.data()[i] = g(rng);
  return ad;
}

Vector lora_forward(const Matrix& base_weight, const LoraAdapter& adapter, const Vector& x) {
  check_shapes(base_weight, adapter);
  require(x.size() == base_weight.cols(), "LoRA input length does not match d_in");
  Vector y = base_weight * x;
  y.noalias() += adapter.scale() * (adapter.b * (adapter.a * x));
  return y;
}

Matrix lora_merge(const Matrix& base_weight, const LoraAdapter& adapter) {
  check_shapes(base_weight, adapter);
  return base_weight + adapter.scale() * adapter.b * adapter.a;
}

Matrix lora_apply_rows(const Matrix& x, const Matrix& base_weight, const LoraAdapter* adapter,
                       Matrix* xa) {
  Matrix y = x * base_weight.transpose();
  if (adapter != nullptr) {
    Matrix low = x * adapter->a.transpose();
    y.noalias() += adapter->scale() * (low * adapter->b.transpose());
    if (xa != nullptr) *xa = std::move(low);
  }
  return y;
}

LoraSet LoraSet::init(int n_layers, int d_model, int rank, double alpha, std::uint64_t seed) {
  LoraSet set;
  for (int l = 0; l < n_layers; ++l) {
    set.query.push_back(LoraAdapter::init(d_model, d_model, rank, alpha,
                                          substream_seed(seed, "lora-q", l)));
    set.value.push_back(LoraAdapter::init(d_model, d_model, rank, alpha,
                                          substream_seed(seed, "lora-v", l)));
  }
  return set;
}

std::vector<ParamRef> LoraSet::params() {
  std::vector<ParamRef> out;
  for (std::size_t l = 0; l < query.size(); ++l) {
    const std::string p = "lora." + std::to_string(l);
    out.push_back({p + ".q.a", &query[l].a});
    out.push_back({p + ".q.b", &query[l].b});
    out.push_back({p + ".v.a", &value[l].a});
    out.push_back({p + ".v.b", &value[l].b});
  }
  return out;
}

std::vector<ConstParamRef> LoraSet::params() const {
  std::vector<ConstParamRef> out;
  for (std::size_t l = 0; l < query.size(); ++l) {
    const std::string p = "lora." + std::to_string(l);
    out.push_back({p + ".q.a", &query[l].a});
    out.push_back({p + ".q.b", &query[l].b});
    out.push_back({p + ".v.a", &value[l].a});
    out.push_back({p + ".v.b", &value[l].b});
  }
  return out;
}

}  // namespace slamkit
