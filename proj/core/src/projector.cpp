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

#include "slamkit/projector.hpp"

#include <cmath>

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

Projector Projector::init(int d_z, int hidden, int d_llm, std::uint64_t seed) {
  require(d_z >= 1 && hidden >= 1 && d_llm >= 1, "projector dimensions must be positive");
  Projector p = zeros(d_z, hidden, d_llm);
  Rng rng = make_rng(seed, "projector-init");
  // He-style fan-in scaling for the ReLU layer, fan-in scaling for the output.
  std::normal_distribution<double> g1(0.0, std::sqrt(2.0 / d_z));
  std::normal_distribution<double> g2(0.0, 1.0 / std::sqrt(static_cast<double>(hidden)));
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = g1(rng);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) p.w2.data()[i] = g2(rng);
  return p;
}

Projector Projector::zeros(int d_z, int hidden, int d_llm) {
  Projector p;
  p.w1 = Matrix::Zero(d_z, hidden);
  p.b1 = Matrix::Zero(1, hidden);
  p.w2 = Matrix::Zero(hidden, d_llm);
  p.b2 = Matrix::Zero(1, d_llm);
  return p;
}

Projector Projector::identity(int dim) {
  Projector p = zeros(dim, 2 * dim, dim);
  for (int i = 0; i < dim; ++i) {
    p.w1(i, i) = 1.0;
    p.w1(i, dim + i) = -1.0;
    p.w2(i, i) = 1.0;
    p.w2(dim + i, i) = -1.0;
  }
  return p;
}

std::vector<ParamRef> Projector::params() {
  return {{"projector.w1", &w1}, {"projector.b1", &b1},
          {"projector.w2", &w2}, {"projector.b2", &b2}};
}

std::vector<ConstParamRef> Projector::params() const {
  return {{"projector.w1", &w1}, {"projector.b1", &b1},
          {"projector.w2", &w2}, {"projector.b2", &b2}};
}

Matrix projector_forward(const Projector& p, const Matrix& z, ProjectorTrace* trace) {
  require(z.cols() == p.d_in(), "projector input width " + std::to_string(z.cols()) +
                                    " does not match d_z " + std::to_string(p.d_in()));
  Matrix pre = z * p.w1;
  pre.rowwise() += p.b1.row(0);
  Matrix hidden = pre.cwiseMax(0.0);
  Matrix out = hidden * p.w2;
  out.rowwise() += p.b2.row(0);
  if (trace != nullptr) {
    trace->input = z;
    trace->pre_activation = std::move(pre);
    trace->hidden = std::move(hidden);
  }
  return out;
}

SpeechTokenEmbeddings projector_forward(const Projector& p, const DownsampledFeatures& z) {
  return {projector_forward(p, z.features)};
}

std::vector<Matrix> projector_backward(const Projector& p, const ProjectorTrace& trace,
                                       const Matrix& d_out) {
  std::vector<Matrix> grads(4);
  grads[3] = d_out.colwise().sum();
  grads[2] = trace.hidden.transpose() * d_out;
  Matrix d_hidden = d_out * p.w2.transpose();
  d_hidden = (trace.pre_activation.array() > 0.0).select(d_hidden, 0.0);
  grads[1] = d_hidden.colwise().sum();
  grads[0] = trace.input.transpose() * d_hidden;
  return grads;
}

}  // namespace slamkit
