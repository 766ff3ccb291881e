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

#include "slamkit/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <memory>

#include "slamkit/error.hpp"
#include "slamkit/eval.hpp"
#include "slamkit/perturb.hpp"
#include "slamkit/train.hpp"

namespace slamkit {

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c, double sigma) {
  std::normal_distribution<double> g(0.0, sigma);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

struct TinySetup {
  ToyLM lm;
  ConnectorExample example;
};

TinySetup tiny_setup(std::uint64_t seed) {
  LmConfig c;
  c.vocab_size = 12;
  c.d_model = 8;
  c.n_layers = 2;
  c.n_heads = 2;
  c.d_ff = 16;
  c.max_seq_len = 32;
  ToyLM lm(c, Vocabulary::synthetic(12), substream_seed(seed, "lm"));
  Rng rng = make_rng(seed, "example");
  ConnectorExample ex;
  ex.id = "tiny";
  ex.z.k = 2;
  ex.z.features = random_matrix(rng, 3, 6, 1.0);
  ex.reference = {9, 11, 10};
  return {std::move(lm), std::move(ex)};
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

CtcInstance random_ctc_instance(Rng& rng, int max_t, int max_l, int max_v) {
  const int v = 1 + static_cast<int>(rng() % max_v);
  CtcInstance inst;
  int len = static_cast<int>(rng() % (max_l + 1));
  for (;;) {
    inst.labels.clear();
    for (int i = 0; i < len; ++i) inst.labels.push_back(1 + static_cast<int>(rng() % v));
    if (ctc_min_frames(inst.labels) <= max_t) break;
    len = std::max(0, len - 1);
  }
  const int t_min = std::max(1, ctc_min_frames(inst.labels));
  const int t = t_min + static_cast<int>(rng() % (max_t - t_min + 1));
  inst.log_probs = row_log_softmax(random_matrix(rng, t, v + 1, 2.0));
  return inst;
}

GradProblem projector_grad_problem(std::uint64_t seed) {
  auto setup = std::make_shared<TinySetup>(tiny_setup(seed));
  Rng rng = make_rng(seed, "projector");
  auto base = std::make_shared<Projector>(Projector::init(6, 10, 8, seed));
  base->b1 = random_matrix(rng, 1, 10, 0.5);
  base->b2 = random_matrix(rng, 1, 8, 0.5);
  GradProblem p;
  p.name = "projector";
  p.step = 1e-4;
  p.point = flatten(std::as_const(*base).params());
  p.loss = [setup, base](const Vector& x) {
    Projector q = *base;
    unflatten(x, q.params());
    return connector_loss(setup->lm, q, nullptr, setup->example, {}, false).loss;
  };
  p.analytic = flatten(connector_loss(setup->lm, *base, nullptr, setup->example, {}, true).projector_grads);
  return p;
}

GradProblem lora_grad_problem(std::uint64_t seed) {
  auto setup = std::make_shared<TinySetup>(tiny_setup(seed));
  Rng rng = make_rng(seed, "lora-point");
  auto proj = std::make_shared<Projector>(Projector::init(6, 10, 8, seed));
  auto base = std::make_shared<LoraSet>(LoraSet::init(2, 8, 2, 4.0, seed));
  // Move off the B = 0 start so gradients reach A as well.
  for (auto& r : base->params()) *r.value = random_matrix(rng, r.value->rows(), r.value->cols(), 0.3);
  GradProblem p;
  p.name = "lora";
  p.step = 1e-4;
  p.point = flatten(std::as_const(*base).params());
  p.loss = [setup, proj, base](const Vector& x) {
    LoraSet s = *base;
    unflatten(x, s.params());
    return connector_loss(setup->lm, *proj, &s, setup->example, {}, false).loss;
  };
  p.analytic = flatten(connector_loss(setup->lm, *proj, base.get(), setup->example, {}, true).lora_grads);
  return p;
}

GradProblem lm_grad_problem(std::uint64_t seed) {
  auto setup = std::make_shared<TinySetup>(tiny_setup(seed));
  const TokenSequence tokens = setup->example.reference;
  GradProblem p;
  p.name = "toy-lm";
  p.step = 1e-4;
  p.point = flatten(setup->lm.weights().refs());
  p.loss = [setup, tokens](const Vector& x) {
    LmWeights w = setup->lm.weights();
    unflatten(x, w.refs());
    const ToyLM lm(setup->lm.config(), setup->lm.vocab(), std::move(w));
    return copy_task_loss(lm, tokens, {}, nullptr).loss;
  };
  LmWeights g = setup->lm.weights().zeros_like();
  copy_task_loss(setup->lm, tokens, {}, &g);
  p.analytic = flatten(std::as_const(g).refs());
  return p;
}

GradProblem ctc_grad_problem(std::uint64_t seed) {
  Rng rng = make_rng(seed, "ctc-grad");
  const CtcInstance inst = random_ctc_instance(rng);
  // Differentiate through raw logits; log_probs are their log-softmax.
  auto logits = std::make_shared<Matrix>(random_matrix(rng, inst.log_probs.rows(), inst.log_probs.cols(), 1.0));
  const TokenSequence labels = inst.labels;
  GradProblem p;
  p.name = "ctc";
  p.point = Eigen::Map<const Vector>(logits->data(), logits->size());
  p.loss = [logits, labels](const Vector& x) {
    Matrix m = Eigen::Map<const Matrix>(x.data(), logits->rows(), logits->cols());
    return ctc_loss({row_log_softmax(m), labels}).loss;
  };
  const CtcResult r = ctc_loss({row_log_softmax(*logits), labels});
  p.analytic = Eigen::Map<const Vector>(r.grad.data(), r.grad.size());
  return p;
}

GradProblem ctc_head_grad_problem(std::uint64_t seed) {
  Rng rng = make_rng(seed, "ctc-head");
  auto ex = std::make_shared<CtcExample>();
  ex->frames.frames = random_matrix(rng, 6, 4, 1.0);
  ex->labels = {1, 2, 2};
  auto head = std::make_shared<CtcHead>(CtcHead::init(4, 4, seed));
  GradProblem p;
  p.name = "ctc-head";
  p.point = flatten(std::as_const(*head).params());
  p.loss = [ex, head](const Vector& x) {
    CtcHead h = *head;
    unflatten(x, h.params());
    return ctc_head_loss(h, *ex, nullptr);
  };
  std::vector<Matrix> g = {Matrix::Zero(4, 4), Matrix::Zero(1, 4)};
  ctc_head_loss(*head, *ex, &g);
  p.analytic = flatten(g);
  return p;
}

SuiteResult selftest_ctc_oracle(std::uint64_t seed, int instances) {
  Rng rng = make_rng(seed, "selftest-ctc");
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const CtcInstance inst = random_ctc_instance(rng);
    worst = std::max(worst, std::abs(ctc_loss(inst).loss - ctc_brute_force(inst)));
  }
  return {"ctc-oracle", worst <= 1e-9,
          std::to_string(instances) + " instances, max |forward - brute force| = " + fmt(worst)};
}

SuiteResult selftest_grad_checks(std::uint64_t seed, int points) {
  double worst = 0.0;
  std::string worst_name;
  for (int i = 0; i < points; ++i) {
    const std::uint64_t s = substream_seed(seed, "selftest-grad", i);
    for (const auto& make : {projector_grad_problem, lora_grad_problem, lm_grad_problem,
                             ctc_grad_problem, ctc_head_grad_problem}) {
      const GradProblem p = make(s);
      const double e = grad_check(p.loss, p.point, p.analytic, p.step);
      if (e > worst) {
        worst = e;
        worst_name = p.name;
      }
    }
  }
  return {"grad-check", worst < 1e-4,
          "max relative error " + fmt(worst) + (worst_name.empty() ? "" : " (" + worst_name + ")")};
}

SuiteResult selftest_snr(std::uint64_t seed, int pairs) {
  Rng rng = make_rng(seed, "selftest-snr");
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  const auto grid = make_grid(PerturbKind::kNoise);
  for (int i = 0; i < pairs; ++i) {
    std::vector<double> s(800 + rng() % 4000), n(300 + rng() % 6000);
    const double sa = 0.05 + 0.01 * (rng() % 50);
    for (auto& x : s) x = sa * g(rng);
    for (auto& x : n) x = g(rng);
    const Waveform sig(std::move(s), 16000), noise(std::move(n), 16000);
    const double snr = grid[i % grid.size()].snr_db();
    const NoiseMix m = mix_noise_detailed(sig, noise, snr, substream_seed(seed, "pair", i));
    std::vector<double> scaled(m.aligned_noise);
    for (auto& x : scaled) x *= m.gain;
    const double measured = 10.0 * std::log10(mean_power(sig) / mean_power(std::span<const double>(scaled)));
    worst = std::max(worst, std::abs(measured - snr));
  }
  return {"snr", worst <= 1e-9, std::to_string(pairs) + " pairs, max |SNR error| = " + fmt(worst) + " dB"};
}

SuiteResult selftest_tsm() {
  const int rate = 16000;
  std::vector<double> tone(2 * rate);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    tone[i] = 0.5 * std::sin(2.0 * 3.14159265358979323846 * 220.0 * i / rate);
  }
  const Waveform w(tone, rate);
  const int n_fft = 16384;
  auto peak = [&](const Waveform& x) {
    const auto p = power_spectrum(x.samples(), n_fft);
    return static_cast<long>(std::max_element(p.begin(), p.end()) - p.begin());
  };
  const long ref_peak = peak(w);
  bool ok = time_scale(w, 1.0) == w;
  double worst_len = 0.0;
  long worst_bin = 0;
  for (const auto& c : make_grid(PerturbKind::kTempo)) {
    const Waveform y = time_scale(w, c.ratio());
    worst_len = std::max(worst_len, std::abs(static_cast<double>(y.frame_count()) - tone.size() / c.ratio()));
    worst_bin = std::max(worst_bin, std::labs(peak(y) - ref_peak));
  }
  ok = ok && worst_len <= 512.0 && worst_bin <= 1;
  return {"tsm", ok,
          "max length deviation " + fmt(worst_len) + " samples, max peak shift " +
              std::to_string(worst_bin) + " bins, identity bypass " +
              (time_scale(w, 1.0) == w ? "exact" : "broken")};
}

SuiteResult selftest_wer(std::uint64_t seed, int pairs) {
  Rng rng = make_rng(seed, "selftest-wer");
  auto draw = [&] {
    std::vector<int> s(rng() % 7);
    for (auto& x : s) x = static_cast<int>(rng() % 3);
    return s;
  };
  // Memoized recursion over suffixes as the independent oracle.
  auto oracle = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::map<std::pair<std::size_t, std::size_t>, int> memo;
    std::function<int(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> int {
      if (i == a.size()) return static_cast<int>(b.size() - j);
      if (j == b.size()) return static_cast<int>(a.size() - i);
      const auto key = std::make_pair(i, j);
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      const int v = std::min({d(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1), d(i + 1, j) + 1, d(i, j + 1) + 1});
      memo[key] = v;
      return v;
    };
    return d(0, 0);
  };
  int bad = 0;
  for (int i = 0; i < pairs; ++i) {
    const auto ref = draw(), hyp = draw();
    const WerReport r = align_edit(ref, hyp).report;
    const bool good = r.errors() == oracle(ref, hyp) &&
                      static_cast<int>(hyp.size()) - static_cast<int>(ref.size()) == r.insertions - r.deletions &&
                      r.substitutions + r.deletions <= r.n_ref;
    bad += good ? 0 : 1;
  }
  WerReport over;
  over.n_ref = 20;
  over.insertions = 21;
  const bool inf_rule = over.displayed() == "∞";
  return {"wer", bad == 0 && inf_rule,
          std::to_string(pairs) + " pairs, " + std::to_string(bad) + " mismatches, >100% renders " +
              over.displayed()};
}

std::vector<SuiteResult> run_selftests(std::uint64_t seed) {
  return {selftest_ctc_oracle(seed), selftest_grad_checks(seed), selftest_snr(seed),
          selftest_tsm(), selftest_wer(seed)};
}

}  // namespace slamkit
