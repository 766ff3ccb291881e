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
#include <functional>
#include <string>
#include <vector>

#include "slamkit/ctc.hpp"
#include "slamkit/linalg.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Random CTC instance with T <= max_t, L <= max_l, labels over 1..max_v
// and a feasible length.
CtcInstance random_ctc_instance(Rng& rng, int max_t = 6, int max_l = 3, int max_v = 3);

// A scalar loss over a flat parameter vector with its analytic gradient at
// `point`, for finite-difference checking.
struct GradProblem {
  std::string name;
  std::function<double(const Vector&)> loss;
  Vector point;
  Vector analytic;
  // Central-difference step: large enough that fp64 cancellation on small
  // gradient entries stays below the tolerance, small enough for truncation.
  double step = 1e-6;
};

// Tiny random instances: projector-only connector loss, connector loss with
// LoRA adapters (gradient over the adapters), copy-task LM loss over every
// LM block, CTC loss over logits, and the CTC head loss.
GradProblem projector_grad_problem(std::uint64_t seed);
GradProblem lora_grad_problem(std::uint64_t seed);
GradProblem lm_grad_problem(std::uint64_t seed);
GradProblem ctc_grad_problem(std::uint64_t seed);
GradProblem ctc_head_grad_problem(std::uint64_t seed);

// Fast property suites shared by `slamkit selftest`.
SuiteResult selftest_ctc_oracle(std::uint64_t seed, int instances = 200);
SuiteResult selftest_grad_checks(std::uint64_t seed, int points = 3);
SuiteResult selftest_snr(std::uint64_t seed, int pairs = 50);
SuiteResult selftest_tsm();
SuiteResult selftest_wer(std::uint64_t seed, int pairs = 10000);

std::vector<SuiteResult> run_selftests(std::uint64_t seed);

}  // namespace slamkit
