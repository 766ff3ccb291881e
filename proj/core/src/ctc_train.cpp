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

#include <chrono>
#include <cmath>
#include <limits>

#include "slamkit/ctc.hpp"
#include "slamkit/error.hpp"
#include "slamkit/parallel.hpp"
#include "slamkit/train.hpp"

namespace slamkit {

namespace {

struct Split {
  std::vector<std::size_t> usable;
  int skipped = 0;
};

Split feasible(const std::vector<CtcExample>& set) {
  Split s;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].frames.n_frames() >= ctc_min_frames(set[i].labels)) {
      s.usable.push_back(i);
    } else {
      ++s.skipped;
    }
  }
  return s;
}

double mean_loss(const CtcHead& head, const std::vector<CtcExample>& set,
                 const std::vector<std::size_t>& idx, int workers) {
  if (idx.empty()) return 0.0;
  std::vector<double> r(idx.size());
  parallel_for(idx.size(), workers, [&](std::size_t i) { r[i] = ctc_head_loss(head, set[idx[i]], nullptr); });
  double sum = 0.0;
  for (double x : r) sum += x;
  return sum / idx.size();
}

}  // namespace

CtcTrainResult train_ctc_baseline(const std::vector<CtcExample>& train,
                                  const std::vector<CtcExample>& dev, int n_classes,
                                  const TrainConfig& config) {
  validate(config);
  require(!train.empty(), "CTC training corpus is empty");
  const int d_enc = static_cast<int>(train.front().frames.dim());
  for (const auto& ex : train) {
    require(ex.frames.dim() == d_enc, "CTC corpus frames have inconsistent widths");
  }

  CtcTrainResult result{CtcHead::init(d_enc, n_classes, config.seed), 0, {}};
  const Split tr = feasible(train);
  const Split dv = feasible(dev);
  result.skipped = tr.skipped + dv.skipped;
  const std::vector<CtcExample>& dev_set = dev.empty() ? train : dev;
  const std::vector<std::size_t>& dev_idx = dev.empty() ? tr.usable : dv.usable;
  if (tr.usable.empty()) return result;

  std::vector<int> lengths;
  for (std::size_t i : tr.usable) lengths.push_back(static_cast<int>(train[i].frames.n_frames()));
  Rng order_rng = make_rng(config.seed, "batch-order");
  AdamState adam;
  CtcHead head = result.head;
  double best_dev = std::numeric_limits<double>::infinity();
  int stale = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    double train_loss = 0.0;
    for (const auto& batch : make_batches(lengths, config.batch_size, order_rng)) {
      std::vector<std::vector<Matrix>> slots(batch.size());
      std::vector<double> losses(batch.size());
      parallel_for(batch.size(), config.workers, [&](std::size_t b) {
        slots[b] = {Matrix::Zero(head.weight.rows(), head.weight.cols()),
                    Matrix::Zero(1, head.bias.cols())};
        losses[b] = ctc_head_loss(head, train[tr.usable[batch[b]]], &slots[b]);
      });
      std::vector<Matrix> grads = {Matrix::Zero(head.weight.rows(), head.weight.cols()),
                                   Matrix::Zero(1, head.bias.cols())};
      for (std::size_t b = 0; b < batch.size(); ++b) {
        if (!std::isfinite(losses[b])) {
          throw TrainingFailedError("non-finite CTC loss at epoch " + std::to_string(epoch));
        }
        train_loss += losses[b];
        grads[0] += slots[b][0] / static_cast<double>(batch.size());
        grads[1] += slots[b][1] / static_cast<double>(batch.size());
      }
      adamw_step(head.params(), grads, adam, config);
    }
    head.trained_epochs = epoch;
    EpochLog e;
    e.epoch = epoch;
    e.train_loss = train_loss / tr.usable.size();
    e.dev_loss = mean_loss(head, dev_set, dev_idx, config.workers);
    e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    e.checksums = block_checksums(std::as_const(head).params());
    const double dev_loss = e.dev_loss;
    result.log.push_back(std::move(e));
    if (dev_loss < best_dev) {
      best_dev = dev_loss;
      stale = 0;
      result.head = head;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  return result;
}

}  // namespace slamkit
