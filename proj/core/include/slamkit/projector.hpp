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

#include "slamkit/features.hpp"
#include "slamkit/linalg.hpp"
#include "slamkit/params.hpp"

namespace slamkit {

// E_i = ReLU(Z_i W1 + b1) W2 + b2 with Z_i a row of stacked frames.
struct Projector {
  Matrix w1;  // d_z x hidden
  Matrix b1;  // 1 x hidden
  Matrix w2;  // hidden x d_llm
  Matrix b2;  // 1 x d_llm
  // Optimizer epochs applied; zero means freshly initialized.
  int trained_epochs = 0;

  static Projector init(int d_z, int hidden, int d_llm, std::uint64_t seed);
  static Projector zeros(int d_z, int hidden, int d_llm);
  // Exact identity through the ReLU: W1 = [I, -I], W2 = [I; -I].
  static Projector identity(int dim);

  int d_in() const { return static_cast<int>(w1.rows()); }
  int hidden() const { return static_cast<int>(w1.cols()); }
  int d_out() const { return static_cast<int>(w2.cols()); }

  std::vector<ParamRef> params();
  std::vector<ConstParamRef> params() const;
};

struct SpeechTokenEmbeddings {
  Matrix embeddings;  // n x d_llm

  Eigen::Index rows() const { return embeddings.rows(); }
};

struct ProjectorTrace {
  Matrix input;
  Matrix pre_activation;
  Matrix hidden;
};

Matrix projector_forward(const Projector& p, const Matrix& z, ProjectorTrace* trace = nullptr);
SpeechTokenEmbeddings projector_forward(const Projector& p, const DownsampledFeatures& z);

// Gradients aligned with Projector::params().
std::vector<Matrix> projector_backward(const Projector& p, const ProjectorTrace& trace,
                                       const Matrix& d_out);

}  // namespace slamkit
