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

#include "slamkit/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "slamkit/checkpoint.hpp"
#include "slamkit/decode.hpp"
#include "slamkit/error.hpp"
#include "slamkit/parallel.hpp"

namespace slamkit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void add_into(std::vector<Matrix>& acc, const std::vector<Matrix>& g, double scale) {
  if (acc.empty()) {
    acc.reserve(g.size());
    for (const auto& m : g) acc.push_back(m * scale);
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i] * scale;
}

std::vector<Matrix> weight_blocks(LmWeights& w) {
  std::vector<Matrix> out;
  for (auto& r : w.refs()) out.push_back(std::move(*r.value));
  return out;
}

}  // namespace

std::string to_string(Precision p) { return p == Precision::kFp64 ? "fp64" : "fp32"; }

Precision parse_precision(const std::string& s) {
  if (s == "fp64" || s == "64") return Precision::kFp64;
  if (s == "fp32" || s == "32") return Precision::kFp32;
  throw ValidationError("unknown precision '" + s + "' (expected fp64 or fp32)");
}

void validate(const TrainConfig& c) {
  require(c.learning_rate > 0.0 && std::isfinite(c.learning_rate), "learning_rate must be > 0");
  require(c.batch_size >= 1, "batch_size must be >= 1");
  require(c.max_epochs >= 0, "max_epochs must be >= 0");
  require(c.weight_decay >= 0.0, "weight_decay must be >= 0");
  require(c.beta1 >= 0.0 && c.beta1 < 1.0 && c.beta2 >= 0.0 && c.beta2 < 1.0,
          "betas must lie in [0, 1)");
  require(c.epsilon > 0.0, "epsilon must be > 0");
  require(c.patience >= 1, "patience must be >= 1");
  require(c.workers >= 1, "workers must be >= 1");
}

void adamw_step(const std::vector<ParamRef>& params, const std::vector<Matrix>& grads,
                AdamState& state, const TrainConfig& c) {
  require(params.size() == grads.size(), "parameter and gradient block counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    require(params[i].value->rows() == grads[i].rows() &&
                params[i].value->cols() == grads[i].cols(),
            "gradient shape mismatch for " + params[i].name);
    if (!grads[i].allFinite()) {
      throw TrainingFailedError("non-finite gradient in parameter block " + params[i].name);
    }
  }
  if (state.m.empty()) {
    for (const auto& g : grads) {
      state.m.push_back(Matrix::Zero(g.rows(), g.cols()));
      state.v.push_back(Matrix::Zero(g.rows(), g.cols()));
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i].value;
    const Matrix& g = grads[i];
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g.cwiseProduct(g);
    const auto m_hat = state.m[i].array() / bc1;
    const auto v_hat = state.v[i].array() / bc2;
    p.array() -= c.learning_rate * (m_hat / (v_hat.sqrt() + c.epsilon)) +
                 c.learning_rate * c.weight_decay * p.array();
    if (c.precision == Precision::kFp32) {
      p = p.cast<float>().cast<double>();
    }
  }
}

double grad_check(const std::function<double(const Vector&)>& loss, const Vector& point,
                  const Vector& analytic, double step, const std::vector<Eigen::Index>* coords) {
  require(point.size() == analytic.size(), "gradient length does not match the point");
  require(step > 0.0, "finite-difference step must be positive");
  std::vector<Eigen::Index> all;
  if (coords == nullptr) {
    all.resize(static_cast<std::size_t>(point.size()));
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    coords = &all;
  }
  double worst = 0.0;
  Vector x = point;
  for (Eigen::Index i : *coords) {
    x[i] = point[i] + step;
    const double fp = loss(x);
    x[i] = point[i] - step;
    const double fm = loss(x);
    x[i] = point[i];
    const double n = (fp - fm) / (2.0 * step);
    const double a = analytic[i];
    worst = std::max(worst, std::abs(a - n) / std::max(1e-12, std::abs(a) + std::abs(n)));
  }
  return worst;
}

std::vector<BlockChecksum> block_checksums(const std::vector<ConstParamRef>& params) {
  std::vector<BlockChecksum> out;
  for (const auto& p : params) out.push_back({p.name, block_checksum(*p.value)});
  return out;
}

std::string format_run_log(const std::vector<EpochLog>& log) {
  std::ostringstream os;
  char buf[160];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof(buf), "epoch=%d train_loss=%.9g dev_loss=%.9g dev_acc=%.6f wall_s=%.3f",
                  e.epoch, e.train_loss, e.dev_loss, e.dev_accuracy, e.wall_seconds);
    os << buf;
    for (const auto& c : e.checksums) {
      std::snprintf(buf, sizeof(buf), " %s=%016llx", c.name.c_str(),
                    static_cast<unsigned long long>(c.checksum));
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<std::vector<std::size_t>> make_batches(const std::vector<int>& lengths,
                                                   int batch_size, Rng& rng) {
  require(batch_size >= 1, "batch_size must be >= 1");
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    const std::size_t end = std::min(order.size(), i + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  // Fisher-Yates with an explicit draw so the order is library-independent.
  for (std::size_t i = batches.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(batches[i - 1], batches[j]);
  }
  return batches;
}

// ---- LM pretraining ------------------------------------------------------

CopyCorpus make_copy_corpus(const TokenSequence& content_tokens, int train_size, int dev_size,
                            int min_len, int max_len, std::uint64_t seed) {
  require(!content_tokens.empty(), "copy corpus needs content tokens");
  require(min_len >= 1 && max_len >= min_len, "invalid copy corpus length range");
  require(train_size >= 1 && dev_size >= 0, "copy corpus must have training items");
  Rng rng = make_rng(seed, "corpus");
  auto draw = [&](int n) {
    std::vector<TokenSequence> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      const int len = min_len + static_cast<int>(rng() % (max_len - min_len + 1));
      TokenSequence s(len);
      for (auto& t : s) t = content_tokens[rng() % content_tokens.size()];
      out.push_back(std::move(s));
    }
    return out;
  };
  CopyCorpus c;
  c.train = draw(train_size);
  c.dev = draw(dev_size);
  return c;
}

CopyLoss copy_task_loss(const ToyLM& lm, const TokenSequence& tokens, const PromptLayout& layout,
                        LmWeights* grads) {
  const AssembledPrompt p = assemble_prompt(layout, lm.embed(tokens), lm, tokens);
  LmTrace trace;
  const Matrix logits = lm_forward(lm, p.inputs, nullptr, grads ? &trace : nullptr);
  const MaskedLoss ce = masked_cross_entropy(logits, p.next_token_targets());
  if (grads != nullptr) {
    LmGradients g;
    g.weights = std::move(*grads);
    lm_backward(lm, trace, ce.d_logits, nullptr, true, g);
    // Speech and text rows are both token-embedding lookups.
    for (int t = 0; t < p.length(); ++t) {
      const TokenId id = t < p.n_speech ? tokens[t] : p.input_ids[t];
      g.weights.token_embedding.row(id) += g.inputs.row(t);
    }
    *grads = std::move(g.weights);
  }
  return {ce.loss, ce.count, ce.correct};
}

double oracle_exact_match(const ToyLM& lm, const std::vector<TokenSequence>& items,
                          const PromptLayout& layout, int workers) {
  if (items.empty()) return 0.0;
  std::vector<std::uint8_t> hit(items.size(), 0);
  parallel_for(items.size(), workers, [&](std::size_t i) {
    const AssembledPrompt p = assemble_prompt(layout, lm.embed(items[i]), lm);
    LmScorer scorer(lm, p.inputs);
    const Hypothesis h = decode_greedy(scorer, static_cast<int>(items[i].size()) * 2 + 4);
    hit[i] = h.tokens == items[i] ? 1 : 0;
  });
  return static_cast<double>(std::accumulate(hit.begin(), hit.end(), 0)) / items.size();
}

namespace {

struct DevStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

DevStats copy_dev_stats(const ToyLM& lm, const std::vector<TokenSequence>& dev,
                        const PromptLayout& layout, int workers) {
  std::vector<CopyLoss> r(dev.size());
  parallel_for(dev.size(), workers,
               [&](std::size_t i) { r[i] = copy_task_loss(lm, dev[i], layout, nullptr); });
  DevStats s;
  long correct = 0, count = 0;
  for (const auto& x : r) {
    s.loss += x.loss;
    correct += x.correct;
    count += x.count;
  }
  if (!dev.empty()) s.loss /= dev.size();
  s.accuracy = count > 0 ? static_cast<double>(correct) / count : 0.0;
  return s;
}

}  // namespace

PretrainResult pretrain_toy_lm(const LmConfig& lm_config, const Vocabulary& vocab,
                               const CopyCorpus& corpus, const PretrainConfig& config,
                               const PromptLayout& layout) {
  const TrainConfig& tc = config.train;
  validate(tc);
  require(!corpus.train.empty(), "pretraining corpus is empty");
  if (tc.max_epochs == 0) {
    throw TrainingFailedError("pretraining with zero epochs leaves the LM untrained and unfrozen");
  }
  ToyLM lm(lm_config, vocab, substream_seed(tc.seed, "init"));
  const std::vector<TokenSequence>& dev = corpus.dev.empty() ? corpus.train : corpus.dev;

  std::vector<int> lengths;
  for (const auto& s : corpus.train) lengths.push_back(static_cast<int>(s.size()));
  Rng order_rng = make_rng(tc.seed, "batch-order");
  AdamState state;
  PretrainResult result{lm, {}, 0.0, 0.0};
  DevStats stats;
  double best_acc = -1.0;
  const std::size_t n_batches = (corpus.train.size() + tc.batch_size - 1) / tc.batch_size;
  const double total_steps = static_cast<double>(n_batches) * tc.max_epochs;
  TrainConfig step_cfg = tc;

  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    const auto start = Clock::now();
    double train_loss = 0.0;
    for (const auto& batch : make_batches(lengths, tc.batch_size, order_rng)) {
      std::vector<LmWeights> slots(batch.size(), lm.weights().zeros_like());
      std::vector<double> losses(batch.size());
      parallel_for(batch.size(), tc.workers, [&](std::size_t b) {
        losses[b] = copy_task_loss(lm, corpus.train[batch[b]], layout, &slots[b]).loss;
      });
      std::vector<Matrix> grads;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        add_into(grads, weight_blocks(slots[b]), 1.0 / batch.size());
        train_loss += losses[b];
      }
      if (!std::isfinite(train_loss)) {
        throw TrainingFailedError("non-finite loss during LM pretraining at epoch " +
                                  std::to_string(epoch));
      }
      const double progress = static_cast<double>(state.step) / total_steps;
      step_cfg.learning_rate =
          tc.learning_rate * (1.0 - (1.0 - config.final_lr_fraction) * progress);
      adamw_step(lm.mutable_weights().refs(), grads, state, step_cfg);
    }
    stats = copy_dev_stats(lm, dev, layout, tc.workers);
    if (stats.accuracy > best_acc) {
      best_acc = stats.accuracy;
      result.lm = lm;
    }
    EpochLog e;
    e.epoch = epoch;
    e.train_loss = train_loss / corpus.train.size();
    e.dev_loss = stats.loss;
    e.dev_accuracy = stats.accuracy;
    e.wall_seconds = seconds_since(start);
    e.checksums = block_checksums(lm.weights().refs());
    result.log.push_back(std::move(e));
    if (stats.accuracy >= config.target_accuracy) break;
  }
  lm = result.lm;
  stats.accuracy = best_acc;
  if (stats.accuracy < config.min_accuracy) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "LM pretraining reached %.2f%% dev accuracy (< %.0f%%); "
                  "try more epochs or a larger model",
                  100.0 * stats.accuracy, 100.0 * config.min_accuracy);
    throw TrainingFailedError(buf);
  }
  result.dev_accuracy = stats.accuracy;
  result.dev_exact_match = oracle_exact_match(lm, dev, layout, tc.workers);
  lm.freeze();
  result.lm = std::move(lm);
  return result;
}

// ---- Connector training --------------------------------------------------

ConnectorLoss connector_loss(const ToyLM& lm, const Projector& projector, const LoraSet* lora,
                             const ConnectorExample& ex, const PromptLayout& layout,
                             bool want_grads) {
  ProjectorTrace ptrace;
  const Matrix speech = projector_forward(projector, ex.z.features, want_grads ? &ptrace : nullptr);
  const AssembledPrompt p = assemble_prompt(layout, speech, lm, ex.reference);
  LmTrace trace;
  const Matrix logits = lm_forward(lm, p.inputs, lora, want_grads ? &trace : nullptr);
  const MaskedLoss ce = masked_cross_entropy(logits, p.next_token_targets());
  ConnectorLoss out{ce.loss, ce.count, ce.correct, {}, {}};
  if (want_grads) {
    LmGradients g;
    lm_backward(lm, trace, ce.d_logits, lora, false, g);
    out.projector_grads = projector_backward(projector, ptrace, g.inputs.topRows(p.n_speech));
    out.lora_grads = std::move(g.lora);
  }
  return out;
}

namespace {

struct ConnectorState {
  Projector projector;
  std::optional<LoraSet> lora;
};

DevStats connector_dev_stats(const ToyLM& lm, const ConnectorState& s,
                             const std::vector<ConnectorExample>& dev, const PromptLayout& layout,
                             int workers) {
  std::vector<ConnectorLoss> r(dev.size());
  const LoraSet* lora = s.lora ? &*s.lora : nullptr;
  parallel_for(dev.size(), workers, [&](std::size_t i) {
    r[i] = connector_loss(lm, s.projector, lora, dev[i], layout, false);
  });
  DevStats out;
  long correct = 0, count = 0;
  for (const auto& x : r) {
    out.loss += x.loss;
    correct += x.correct;
    count += x.count;
  }
  if (!dev.empty()) out.loss /= dev.size();
  out.accuracy = count > 0 ? static_cast<double>(correct) / count : 0.0;
  return out;
}

void save_state(const std::string& path, const ConnectorState& s, int k) {
  save_checkpoint(path, to_checkpoint(s.projector, k));
  if (s.lora) save_checkpoint(path + ".lora", to_checkpoint(*s.lora));
}

}  // namespace

ConnectorResult train_projector(const ToyLM& lm, const std::vector<ConnectorExample>& train,
                                const std::vector<ConnectorExample>& dev,
                                const TrainConfig& config, const ConnectorOptions& options) {
  validate(config);
  require(lm.frozen(), "train_projector requires a frozen LM");
  require(!train.empty(), "connector training corpus is empty");
  lm.verify_frozen();
  const int d_z = static_cast<int>(train.front().z.features.cols());
  const int k = train.front().z.k;
  for (const auto& ex : train) {
    require(ex.z.features.cols() == d_z, "utterance " + ex.id + " has a different feature width");
  }

  ConnectorState state{Projector::init(d_z, options.hidden, lm.d_model(), config.seed), {}};
  if (options.lora) {
    state.lora = LoraSet::init(lm.config().n_layers, lm.d_model(), options.lora->rank,
                               options.lora->alpha, config.seed);
  }
  const std::vector<ConnectorExample>& dev_set = dev.empty() ? train : dev;

  std::vector<int> lengths;
  for (const auto& ex : train) {
    lengths.push_back(static_cast<int>(ex.z.rows() + ex.reference.size()));
  }
  Rng order_rng = make_rng(config.seed, "batch-order");
  AdamState adam;
  ConnectorResult result{state.projector, state.lora, {}, 0};
  double best_dev = std::numeric_limits<double>::infinity();
  int stale = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = Clock::now();
    double train_loss = 0.0;
    for (const auto& batch : make_batches(lengths, config.batch_size, order_rng)) {
      const LoraSet* lora = state.lora ? &*state.lora : nullptr;
      std::vector<ConnectorLoss> slots(batch.size());
      parallel_for(batch.size(), config.workers, [&](std::size_t b) {
        slots[b] = connector_loss(lm, state.projector, lora, train[batch[b]], options.layout, true);
      });
      std::vector<Matrix> grads;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const double w = 1.0 / batch.size();
        train_loss += slots[b].loss;
        if (!std::isfinite(slots[b].loss)) {
          throw TrainingFailedError(
              "non-finite loss on utterance " + train[batch[b]].id + " at epoch " +
              std::to_string(epoch) +
              (options.last_good_path.empty() ? std::string()
                                              : "; last good checkpoint: " + options.last_good_path));
        }
        std::vector<Matrix> g = std::move(slots[b].projector_grads);
        for (auto& m : slots[b].lora_grads) g.push_back(std::move(m));
        add_into(grads, g, w);
      }
      std::vector<ParamRef> params = state.projector.params();
      if (state.lora) {
        for (auto& r : state.lora->params()) params.push_back(r);
      }
      adamw_step(params, grads, adam, config);
    }
    state.projector.trained_epochs = epoch;
    const DevStats stats = connector_dev_stats(lm, state, dev_set, options.layout, config.workers);
    if (!std::isfinite(stats.loss)) {
      throw TrainingFailedError(
          "non-finite dev loss at epoch " + std::to_string(epoch) +
          (options.last_good_path.empty() ? std::string()
                                          : "; last good checkpoint: " + options.last_good_path));
    }
    if (!options.last_good_path.empty()) save_state(options.last_good_path, state, k);

    EpochLog e;
    e.epoch = epoch;
    e.train_loss = train_loss / train.size();
    e.dev_loss = stats.loss;
    e.dev_accuracy = stats.accuracy;
    e.wall_seconds = seconds_since(start);
    e.checksums = block_checksums(std::as_const(state.projector).params());
    if (state.lora) {
      for (auto& c : block_checksums(std::as_const(*state.lora).params())) e.checksums.push_back(c);
    }
    result.log.push_back(std::move(e));

    if (stats.loss < best_dev) {
      best_dev = stats.loss;
      stale = 0;
      result.projector = state.projector;
      result.lora = state.lora;
      result.best_epoch = epoch;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  lm.verify_frozen();
  return result;
}

}  // namespace slamkit
