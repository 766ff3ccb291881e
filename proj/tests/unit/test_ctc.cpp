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

#include <cmath>
#include <limits>

#include "slamkit/ctc.hpp"
#include "slamkit/error.hpp"
#include "slamkit/random.hpp"
#include "slamkit/selftest.hpp"
#include "slamkit/train.hpp"

namespace slamkit {
namespace {

Matrix uniform_log_probs(int t, int c) { return Matrix::Constant(t, c, -std::log(static_cast<double>(c))); }

Matrix formula_logits(int t, int c) {
  Matrix m(t, c);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = 2 * std::sin(1.3 * i + 0.7 * j);
  }
  return m;
}

TEST(CtcLoss, SingleEmission) {
  const CtcResult r = ctc_loss({uniform_log_probs(1, 3), {1}});
  EXPECT_NEAR(r.loss, std::log(3.0), 1e-12);
}

TEST(CtcLoss, ThreePathsOfTwoFrames) {
  const CtcResult r = ctc_loss({uniform_log_probs(2, 2), {1}});
  EXPECT_NEAR(r.loss, -std::log(0.75), 1e-12);
  EXPECT_NEAR(r.loss, 0.28768207245178, 1e-12);
  EXPECT_NEAR(ctc_brute_force({uniform_log_probs(2, 2), {1}}), r.loss, 1e-12);
}

TEST(CtcLoss, RepeatsNeedASeparatingBlank) {
  EXPECT_EQ(ctc_min_frames({1, 1}), 3);
  EXPECT_EQ(ctc_min_frames({1, 2, 2}), 4);
  EXPECT_EQ(ctc_min_frames({}), 0);
  try {
    ctc_loss({uniform_log_probs(2, 2), {1, 1}});
    FAIL() << "expected an infeasible error";
  } catch (const InfeasibleError& e) {
    EXPECT_EQ(e.min_frames(), 3);
  }
}

// Values frozen from torch.nn.functional.ctc_loss (float64, blank 0,
// reduction "sum") on log_softmax of the formula logits, with autograd
// gradients with respect to the logits.
struct TorchCase {
  int t, c;
  TokenSequence labels;
  double loss;
  std::vector<double> grad_row0;
  double grad_last;
};

TEST(CtcLoss, MatchesTorchReference) {
  const std::vector<TorchCase> cases = {
      {5, 4, {1, 2, 2}, 5.913748881482883,
       {0.03362877247835188, -0.7680804261194291, 0.411893381917832, 0.3225582717232453}, 0.685896939535183},
      {4, 4, {3, 1}, 2.983957441411748,
       {0.04883302978227935, 0.2081586331928681, 0.4118933819178324, -0.6688850448929798}, 0.4968893104088696},
      {3, 3, {}, 3.5663139466306166, {-0.915284649925477, 0.30727164345540414, 0.6080130064700728},
       0.05864383744941378},
      {6, 3, {1, 1, 2}, 2.8543815663110075,
       {-0.009602449697320551, -0.5984105567727531, 0.6080130064700736}, -0.35147473881806784},
  };
  for (const auto& tc : cases) {
    const CtcInstance inst{row_log_softmax(formula_logits(tc.t, tc.c)), tc.labels};
    const CtcResult r = ctc_loss(inst);
    EXPECT_NEAR(r.loss, tc.loss, 1e-12);
    for (int j = 0; j < tc.c; ++j) EXPECT_NEAR(r.grad(0, j), tc.grad_row0[j], 1e-12);
    EXPECT_NEAR(r.grad(tc.t - 1, tc.c - 1), tc.grad_last, 1e-12);
    EXPECT_NEAR(ctc_brute_force(inst), tc.loss, 1e-12);
  }
}

TEST(CtcLoss, GradientRowsSumToZero) {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const CtcInstance inst = random_ctc_instance(rng);
    const CtcResult r = ctc_loss(inst);
    for (Eigen::Index t = 0; t < r.grad.rows(); ++t) EXPECT_NEAR(r.grad.row(t).sum(), 0.0, 1e-12);
  }
}

TEST(CtcLoss, RandomInstancesMatchEnumeration) {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const CtcInstance inst = random_ctc_instance(rng);
    ASSERT_LE(inst.log_probs.rows(), 6);
    ASSERT_LE(inst.labels.size(), 3u);
    ASSERT_LE(inst.log_probs.cols(), 4);
    EXPECT_NEAR(ctc_loss(inst).loss, ctc_brute_force(inst), 1e-9);
  }
}

TEST(CtcLoss, ZeroProbabilityIsInfinite) {
  Matrix lp = uniform_log_probs(3, 3);
  lp.setConstant(std::log(0.5));
  lp.col(1).setConstant(-std::numeric_limits<double>::infinity());
  const CtcInstance inst{lp, {1}};
  EXPECT_EQ(ctc_brute_force(inst), std::numeric_limits<double>::infinity());
  const CtcResult r = ctc_loss(inst);
  EXPECT_EQ(r.loss, std::numeric_limits<double>::infinity());
}

TEST(CtcLoss, BruteForceRefusesHugeSearches) {
  EXPECT_THROW(ctc_brute_force({uniform_log_probs(20, 3), {1}}), SizeError);
}

TEST(CtcLoss, RejectsUnnormalizedOrBadLabels) {
  EXPECT_ANY_THROW(ctc_loss({Matrix::Zero(3, 3), {1}}));
  EXPECT_ANY_THROW(ctc_loss({uniform_log_probs(3, 3), {0}}));
  EXPECT_ANY_THROW(ctc_loss({uniform_log_probs(3, 3), {3}}));
}

Matrix path_log_probs(const std::vector<int>& path, int c) {
  Matrix lp = Matrix::Constant(path.size(), c, std::log(0.1));
  for (std::size_t t = 0; t < path.size(); ++t) lp(t, path[t]) = std::log(0.9);
  return lp;
}

TEST(CtcGreedy, CollapseRule) {
  EXPECT_EQ(ctc_greedy_decode(path_log_probs({1, 1, 0, 1}, 3)), (TokenSequence{1, 1}));
  EXPECT_TRUE(ctc_greedy_decode(path_log_probs({0, 0, 0}, 3)).empty());
  EXPECT_EQ(ctc_greedy_decode(path_log_probs({1, 2, 2, 0, 2}, 3)), (TokenSequence{1, 2, 2}));
}

// Each label has its own constant frame vector; labels never repeat, so a
// linear head separates them exactly.
std::vector<CtcExample> separable_corpus(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CtcExample> out;
  for (int i = 0; i < n; ++i) {
    CtcExample ex;
    const int len = 2 + static_cast<int>(rng() % 3);
    TokenId prev = 0;
    for (int j = 0; j < len; ++j) {
      TokenId t;
      do t = 1 + static_cast<TokenId>(rng() % 4); while (t == prev);
      ex.labels.push_back(t);
      prev = t;
    }
    ex.frames.frames = Matrix::Zero(3 * len, 5);
    for (int j = 0; j < len; ++j) {
      for (int m = 0; m < 3; ++m) ex.frames.frames(3 * j + m, ex.labels[j] - 1) = 1.0;
      ex.frames.frames(3 * j + 2, 4) = 1.0;  // a trailing "gap" feature per token
    }
    out.push_back(std::move(ex));
  }
  return out;
}

TEST(CtcTrain, SeparableCorpusIsLearnedExactly) {
  const auto train = separable_corpus(40, 1);
  TrainConfig cfg;
  cfg.learning_rate = 0.05;
  cfg.max_epochs = 60;
  cfg.patience = 60;
  const CtcTrainResult r = train_ctc_baseline(train, train, 5, cfg);
  EXPECT_EQ(r.skipped, 0);
  for (const auto& ex : train) {
    EXPECT_EQ(ctc_greedy_decode(ctc_head_log_probs(r.head, ex.frames.frames)), ex.labels);
  }
}

TEST(CtcTrain, ZeroEpochsReturnsInitialization) {
  const auto train = separable_corpus(8, 2);
  TrainConfig cfg;
  cfg.max_epochs = 0;
  cfg.seed = 11;
  const CtcTrainResult r = train_ctc_baseline(train, train, 5, cfg);
  const CtcHead init = CtcHead::init(5, 5, 11);
  EXPECT_EQ(r.head.weight, init.weight);
  EXPECT_EQ(r.head.bias, init.bias);
  EXPECT_EQ(r.head.trained_epochs, 0);
}

TEST(CtcTrain, CountsInfeasibleUtterances) {
  auto train = separable_corpus(10, 3);
  auto dev = separable_corpus(4, 4);
  train[2].frames.frames.conservativeResize(1, Eigen::NoChange);
  train[7].frames.frames.conservativeResize(1, Eigen::NoChange);
  dev[0].frames.frames.conservativeResize(1, Eigen::NoChange);
  TrainConfig cfg;
  cfg.max_epochs = 1;
  EXPECT_EQ(train_ctc_baseline(train, dev, 5, cfg).skipped, 3);
}

TEST(CtcHead, LossGradientMatchesFiniteDifferences) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const GradProblem p = ctc_head_grad_problem(s);
    EXPECT_LT(grad_check(p.loss, p.point, p.analytic, 1e-6), 1e-6);
    const GradProblem q = ctc_grad_problem(s);
    EXPECT_LT(grad_check(q.loss, q.point, q.analytic, 1e-6), 1e-6);
  }
}

}  // namespace
}  // namespace slamkit
