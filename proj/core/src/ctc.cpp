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

#include "slamkit/ctc.hpp"

#include <cmath>
#include <limits>

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void validate(const CtcInstance& inst) {
  const Eigen::Index C = inst.log_probs.cols();
  require(inst.log_probs.rows() >= 1, "CTC needs at least one frame");
  require(C >= 2, "CTC needs a blank and at least one label class");
  for (Eigen::Index t = 0; t < inst.log_probs.rows(); ++t) {
    const auto row = inst.log_probs.row(t);
    const double m = row.maxCoeff();
    const double lse = m + std::log((row.array() - m).exp().sum());
    require(std::isfinite(m) && std::abs(lse) <= 1e-9,
            "CTC log_probs row " + std::to_string(t) + " is not log-softmax normalized");
  }
  for (TokenId l : inst.labels) {
    require(l != kCtcBlank, "CTC labels must not contain the blank index");
    require(l > 0 && l < C, "CTC label " + std::to_string(l) + " outside the class range");
  }
}

}  // namespace

int ctc_min_frames(const TokenSequence& labels) {
  int n = static_cast<int>(labels.size());
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) ++n;
  }
  return n;
}

CtcResult ctc_loss(const CtcInstance& inst) {
  validate(inst);
  const Matrix& lp = inst.log_probs;
  const auto T = static_cast<int>(lp.rows());
  const auto C = lp.cols();
  const int min_t = ctc_min_frames(inst.labels);
  if (T < min_t) {
    throw InfeasibleError("CTC infeasible: " + std::to_string(T) + " frames < minimal " +
                              std::to_string(min_t),
                          min_t);
  }

  // Blank-extended labels: blank, l1, blank, l2, ..., blank.
  const int S = 2 * static_cast<int>(inst.labels.size()) + 1;
  std::vector<TokenId> ext(S, kCtcBlank);
  for (std::size_t i = 0; i < inst.labels.size(); ++i) ext[2 * i + 1] = inst.labels[i];
  auto can_skip = [&](int s) { return s >= 2 && ext[s] != kCtcBlank && ext[s] != ext[s - 2]; };

  Matrix alpha = Matrix::Constant(T, S, kNegInf);
  Matrix beta = Matrix::Constant(T, S, kNegInf);
  alpha(0, 0) = lp(0, ext[0]);
  if (S > 1) alpha(0, 1) = lp(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = log_add(a, alpha(t - 1, s - 1));
      if (can_skip(s)) a = log_add(a, alpha(t - 1, s - 2));
      alpha(t, s) = a == kNegInf ? kNegInf : a + lp(t, ext[s]);
    }
  }
  beta(T - 1, S - 1) = lp(T - 1, ext[S - 1]);
  if (S > 1) beta(T - 1, S - 2) = lp(T - 1, ext[S - 2]);
  for (int t = T - 2; t >= 0; --t) {
    for (int s = 0; s < S; ++s) {
      double b = beta(t + 1, s);
      if (s + 1 < S) b = log_add(b, beta(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) b = log_add(b, beta(t + 1, s + 2));
      beta(t, s) = b == kNegInf ? kNegInf : b + lp(t, ext[s]);
    }
  }

  double log_p = alpha(T - 1, S - 1);
  if (S > 1) log_p = log_add(log_p, alpha(T - 1, S - 2));

  CtcResult r;
  r.grad = Matrix::Zero(T, C);
  if (log_p == kNegInf) {
    r.loss = std::numeric_limits<double>::infinity();
    return r;
  }
  r.loss = -log_p;
  // grad = softmax - posterior occupancy of each class.
  r.grad = lp.array().exp().matrix();
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const double g = alpha(t, s) + beta(t, s) - lp(t, ext[s]);
      if (g == kNegInf) continue;
      r.grad(t, ext[s]) -= std::exp(g - log_p);
    }
  }
  return r;
}

double ctc_brute_force(const CtcInstance& inst) {
  validate(inst);
  const auto T = static_cast<int>(inst.log_probs.rows());
  const auto C = static_cast<int>(inst.log_probs.cols());
  double paths = 1.0;
  for (int t = 0; t < T; ++t) paths *= C;
  if (paths > 1e7) {
    throw SizeError("CTC brute force over " + std::to_string(C) + "^" + std::to_string(T) +
                    " paths exceeds 1e7");
  }
  const auto n = static_cast<std::int64_t>(paths);
  std::vector<int> path(T, 0);
  double total = 0.0;
  TokenSequence collapsed;
  for (std::int64_t code = 0; code < n; ++code) {
    std::int64_t c = code;
    double lp = 0.0;
    for (int t = 0; t < T; ++t) {
      path[t] = static_cast<int>(c % C);
      c /= C;
      lp += inst.log_probs(t, path[t]);
    }
    collapsed.clear();
    int prev = -1;
    for (int t = 0; t < T; ++t) {
      if (path[t] != prev && path[t] != kCtcBlank) collapsed.push_back(path[t]);
      prev = path[t];
    }
    if (collapsed == inst.labels) total += std::exp(lp);
  }
  return total > 0.0 ? -std::log(total) : std::numeric_limits<double>::infinity();
}

TokenSequence ctc_greedy_decode(const Matrix& log_probs) {
  TokenSequence out;
  TokenId prev = -1;
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < log_probs.cols(); ++k) {
      if (log_probs(t, k) > log_probs(t, best)) best = k;
    }
    const auto tok = static_cast<TokenId>(best);
    if (tok != prev && tok != kCtcBlank) out.push_back(tok);
    prev = tok;
  }
  return out;
}

CtcHead CtcHead::init(int d_enc, int n_classes, std::uint64_t seed) {
  require(d_enc >= 1 && n_classes >= 2, "invalid CTC head dimensions");
  CtcHead h;
  h.weight.resize(d_enc, n_classes);
  h.bias = Matrix::Zero(1, n_classes);
  Rng rng = make_rng(seed, "ctc-init");
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(static_cast<double>(d_enc)));
  for (Eigen::Index i = 0; i < h.weight.size(); ++i) h.weight.data()[i] = g(rng);
  return h;
}

std::vector<ParamRef> CtcHead::params() {
  return {{"ctc.weight", &weight}, {"ctc.bias", &bias}};
}

std::vector<ConstParamRef> CtcHead::params() const {
  return {{"ctc.weight", &weight}, {"ctc.bias", &bias}};
}

Matrix row_log_softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const double lse = m + std::log((logits.row(t).array() - m).exp().sum());
    out.row(t) = logits.row(t).array() - lse;
  }
  return out;
}

Matrix ctc_head_logits(const CtcHead& head, const Matrix& frames) {
  require(frames.cols() == head.d_enc(), "CTC head input width does not match d_enc");
  Matrix logits = frames * head.weight;
  logits.rowwise() += head.bias.row(0);
  return logits;
}

Matrix ctc_head_log_probs(const CtcHead& head, const Matrix& frames) {
  return row_log_softmax(ctc_head_logits(head, frames));
}

double ctc_head_loss(const CtcHead& head, const CtcExample& ex, std::vector<Matrix>* grads) {
  const CtcResult r = ctc_loss({ctc_head_log_probs(head, ex.frames.frames), ex.labels});
  if (grads != nullptr && std::isfinite(r.loss)) {
    (*grads)[0].noalias() += ex.frames.frames.transpose() * r.grad;
    (*grads)[1] += r.grad.colwise().sum();
  }
  return r.loss;
}

}  // namespace slamkit
