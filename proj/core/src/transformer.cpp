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

#include "slamkit/transformer.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "slamkit/error.hpp"
#include "slamkit/random.hpp"

namespace slamkit {

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

void fill_normal(Matrix& m, double sigma, Rng& rng) {
  std::normal_distribution<double> g(0.0, sigma);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
}

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias, LayerNormTrace& t) {
  const Eigen::Index d = x.cols();
  t.normalized.resize(x.rows(), d);
  t.inv_std.resize(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const RowVector centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / static_cast<double>(d);
    t.inv_std[r] = 1.0 / std::sqrt(var + kLayerNormEps);
    t.normalized.row(r) = centered * t.inv_std[r];
  }
  Matrix y = (t.normalized.array().rowwise() * gain.row(0).array()).matrix();
  y.rowwise() += bias.row(0);
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& gain, const LayerNormTrace& t,
                           Matrix* d_gain, Matrix* d_bias) {
  if (d_gain != nullptr) {
    *d_gain += (dy.array() * t.normalized.array()).colwise().sum().matrix();
    *d_bias += dy.colwise().sum();
  }
  const Matrix dn = (dy.array().rowwise() * gain.row(0).array()).matrix();
  const auto d = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_dn = dn.row(r).sum() / d;
    const double mean_dn_n = dn.row(r).dot(t.normalized.row(r)) / d;
    dx.row(r) = t.inv_std[r] *
                (dn.row(r).array() - mean_dn - t.normalized.row(r).array() * mean_dn_n).matrix();
  }
  return dx;
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double gelu_grad(double x) {
  const double u = kGeluC * (x + kGeluA * x * x * x);
  const double t = std::tanh(u);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

void add_rows_bias(Matrix& m, const Matrix& bias) { m.rowwise() += bias.row(0); }

LmWeights init_weights(const LmConfig& c, std::uint64_t seed) {
  require(c.vocab_size >= 2 && c.d_model >= 1 && c.n_layers >= 1 && c.n_heads >= 1 &&
              c.d_ff >= 1 && c.max_seq_len >= 1,
          "invalid LM configuration");
  require(c.d_model % c.n_heads == 0, "d_model must be divisible by n_heads");
  Rng rng = make_rng(seed, "lm-init");
  const double proj_sigma = 1.0 / std::sqrt(static_cast<double>(c.d_model));
  const double resid_sigma = proj_sigma / std::sqrt(2.0 * c.n_layers);

  LmWeights w;
  w.token_embedding.resize(c.vocab_size, c.d_model);
  fill_normal(w.token_embedding, 1.0, rng);
  w.position_embedding.resize(c.max_seq_len, c.d_model);
  fill_normal(w.position_embedding, 0.1, rng);
  for (int l = 0; l < c.n_layers; ++l) {
    TransformerLayer layer;
    layer.ln1_gain = Matrix::Ones(1, c.d_model);
    layer.ln1_bias = Matrix::Zero(1, c.d_model);
    for (Matrix* m : {&layer.wq, &layer.wk, &layer.wv}) {
      m->resize(c.d_model, c.d_model);
      fill_normal(*m, proj_sigma, rng);
    }
    layer.wo.resize(c.d_model, c.d_model);
    fill_normal(layer.wo, resid_sigma, rng);
    layer.ln2_gain = Matrix::Ones(1, c.d_model);
    layer.ln2_bias = Matrix::Zero(1, c.d_model);
    layer.ff_in.resize(c.d_ff, c.d_model);
    fill_normal(layer.ff_in, proj_sigma, rng);
    layer.ff_in_bias = Matrix::Zero(1, c.d_ff);
    layer.ff_out.resize(c.d_model, c.d_ff);
    fill_normal(layer.ff_out, 1.0 / std::sqrt(static_cast<double>(c.d_ff)) /
                                  std::sqrt(2.0 * c.n_layers), rng);
    layer.ff_out_bias = Matrix::Zero(1, c.d_model);
    w.layers.push_back(std::move(layer));
  }
  w.final_gain = Matrix::Ones(1, c.d_model);
  w.final_bias = Matrix::Zero(1, c.d_model);
  w.head.resize(c.vocab_size, c.d_model);
  fill_normal(w.head, proj_sigma, rng);
  w.head_bias = Matrix::Zero(1, c.vocab_size);
  return w;
}

}  // namespace

std::vector<ParamRef> LmWeights::refs() {
  std::vector<ParamRef> out = {{"lm.token_embedding", &token_embedding},
                               {"lm.position_embedding", &position_embedding}};
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& L = layers[l];
    const std::string p = "lm.layer" + std::to_string(l) + ".";
    out.push_back({p + "ln1_gain", &L.ln1_gain});
    out.push_back({p + "ln1_bias", &L.ln1_bias});
    out.push_back({p + "wq", &L.wq});
    out.push_back({p + "wk", &L.wk});
    out.push_back({p + "wv", &L.wv});
    out.push_back({p + "wo", &L.wo});
    out.push_back({p + "ln2_gain", &L.ln2_gain});
    out.push_back({p + "ln2_bias", &L.ln2_bias});
    out.push_back({p + "ff_in", &L.ff_in});
    out.push_back({p + "ff_in_bias", &L.ff_in_bias});
    out.push_back({p + "ff_out", &L.ff_out});
    out.push_back({p + "ff_out_bias", &L.ff_out_bias});
  }
  out.push_back({"lm.final_gain", &final_gain});
  out.push_back({"lm.final_bias", &final_bias});
  out.push_back({"lm.head", &head});
  out.push_back({"lm.head_bias", &head_bias});
  return out;
}

std::vector<ConstParamRef> LmWeights::refs() const {
  return const_refs(const_cast<LmWeights*>(this)->refs());
}

LmWeights LmWeights::zeros_like() const {
  LmWeights z = *this;
  for (auto& p : z.refs()) p.value->setZero();
  return z;
}

ToyLM::ToyLM(const LmConfig& config, Vocabulary vocab, std::uint64_t seed)
    : ToyLM(config, std::move(vocab), init_weights(config, seed)) {}

ToyLM::ToyLM(const LmConfig& config, Vocabulary vocab, LmWeights weights)
    : config_(config), vocab_(std::move(vocab)), weights_(std::move(weights)) {
  require(vocab_.size() == config_.vocab_size,
          "vocabulary size " + std::to_string(vocab_.size()) +
              " does not match LM vocab_size " + std::to_string(config_.vocab_size));
  require(static_cast<int>(weights_.layers.size()) == config_.n_layers,
          "layer count does not match the LM configuration");
  require(weights_.token_embedding.rows() == config_.vocab_size &&
              weights_.token_embedding.cols() == config_.d_model,
          "token embedding shape does not match the LM configuration");
  for (Eigen::Index i = 0; i < weights_.token_embedding.size(); ++i) {
    require(std::isfinite(weights_.token_embedding.data()[i]), "non-finite embedding entry");
  }
}

LmWeights& ToyLM::mutable_weights() {
  if (frozen_) throw Error(ErrorKind::kRuntime, "attempt to modify a frozen LM");
  return weights_;
}

Matrix ToyLM::embed(const TokenSequence& tokens) const {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), config_.d_model);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    require(vocab_.contains(tokens[i]),
            "unknown token id " + std::to_string(tokens[i]));
    out.row(static_cast<Eigen::Index>(i)) = weights_.token_embedding.row(tokens[i]);
  }
  return out;
}

std::uint64_t ToyLM::checksum() const { return parameter_checksum(weights_.refs()); }

void ToyLM::freeze() {
  frozen_checksum_ = checksum();
  frozen_ = true;
}

void ToyLM::verify_frozen() const {
  if (frozen_ && checksum() != frozen_checksum_) {
    throw Error(ErrorKind::kRuntime, "frozen LM parameters changed (checksum mismatch)");
  }
}

Vector log_softmax(const Eigen::Ref<const RowVector>& logits) {
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return (logits.array() - lse).matrix().transpose();
}

Matrix lm_forward(const ToyLM& lm, const Matrix& inputs, const LoraSet* lora, LmTrace* trace) {
  const auto& c = lm.config();
  const auto& w = lm.weights();
  const Eigen::Index T = inputs.rows();
  require(inputs.cols() == c.d_model, "LM input width does not match d_model");
  require(T <= c.max_seq_len, "sequence length " + std::to_string(T) +
                                  " exceeds max_seq_len " + std::to_string(c.max_seq_len));
  if (lora != nullptr && lora->empty()) lora = nullptr;
  if (lora != nullptr) {
    require(static_cast<int>(lora->query.size()) == c.n_layers,
            "LoRA set does not cover every layer");
  }
  const int H = c.n_heads;
  const int dh = c.d_model / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  LmTrace local;
  LmTrace& t = trace != nullptr ? *trace : local;
  t.inputs = inputs;
  t.layers.assign(c.n_layers, {});

  Matrix h = inputs + w.position_embedding.topRows(T);
  for (int l = 0; l < c.n_layers; ++l) {
    const auto& L = w.layers[l];
    auto& lt = t.layers[l];
    lt.input = h;
    lt.ln1_out = layer_norm(h, L.ln1_gain, L.ln1_bias, lt.ln1);
    const LoraAdapter* aq = lora != nullptr ? &lora->query[l] : nullptr;
    const LoraAdapter* av = lora != nullptr ? &lora->value[l] : nullptr;
    lt.q = lora_apply_rows(lt.ln1_out, L.wq, aq, &lt.q_lora);
    lt.k = lt.ln1_out * L.wk.transpose();
    lt.v = lora_apply_rows(lt.ln1_out, L.wv, av, &lt.v_lora);

    lt.attn.resize(T, c.d_model);
    lt.probs.resize(H);
    for (int hd = 0; hd < H; ++hd) {
      Matrix s = lt.q.middleCols(hd * dh, dh) * lt.k.middleCols(hd * dh, dh).transpose();
      s *= scale;
      Matrix& p = lt.probs[hd];
      p = Matrix::Zero(T, T);
      for (Eigen::Index i = 0; i < T; ++i) {
        const double m = s.row(i).head(i + 1).maxCoeff();
        double z = 0.0;
        for (Eigen::Index j = 0; j <= i; ++j) {
          p(i, j) = std::exp(s(i, j) - m);
          z += p(i, j);
        }
        p.row(i).head(i + 1) /= z;
      }
      lt.attn.middleCols(hd * dh, dh) = p * lt.v.middleCols(hd * dh, dh);
    }
    lt.mid = h + lt.attn * L.wo.transpose();

    lt.ln2_out = layer_norm(lt.mid, L.ln2_gain, L.ln2_bias, lt.ln2);
    lt.ff_pre = lt.ln2_out * L.ff_in.transpose();
    add_rows_bias(lt.ff_pre, L.ff_in_bias);
    lt.ff_act = lt.ff_pre.unaryExpr([](double x) { return gelu(x); });
    h = lt.mid + lt.ff_act * L.ff_out.transpose();
    add_rows_bias(h, L.ff_out_bias);
  }
  t.final_input = h;
  t.final_out = layer_norm(h, w.final_gain, w.final_bias, t.final_ln);
  Matrix logits = t.final_out * w.head.transpose();
  add_rows_bias(logits, w.head_bias);
  return logits;
}

void lm_backward(const ToyLM& lm, const LmTrace& t, const Matrix& d_logits, const LoraSet* lora,
                 bool want_weight_grads, LmGradients& g) {
  const auto& c = lm.config();
  const auto& w = lm.weights();
  const Eigen::Index T = t.inputs.rows();
  if (lora != nullptr && lora->empty()) lora = nullptr;
  const int H = c.n_heads;
  const int dh = c.d_model / H;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  if (want_weight_grads && g.weights.layers.size() != w.layers.size()) {
    g.weights = w.zeros_like();
  }
  if (lora != nullptr && g.lora.empty()) g.lora = zeros_like(lora->params());
  LmWeights* gw = want_weight_grads ? &g.weights : nullptr;

  if (gw != nullptr) {
    gw->head.noalias() += d_logits.transpose() * t.final_out;
    gw->head_bias += d_logits.colwise().sum();
  }
  Matrix dh_mat = d_logits * w.head;
  dh_mat = layer_norm_backward(dh_mat, w.final_gain, t.final_ln,
                               gw ? &gw->final_gain : nullptr, gw ? &gw->final_bias : nullptr);

  for (int l = c.n_layers - 1; l >= 0; --l) {
    const auto& L = w.layers[l];
    const auto& lt = t.layers[l];
    TransformerLayer* gl = gw ? &gw->layers[l] : nullptr;

    // Feed-forward branch.
    const Matrix& d_out = dh_mat;
    if (gl != nullptr) {
      gl->ff_out.noalias() += d_out.transpose() * lt.ff_act;
      gl->ff_out_bias += d_out.colwise().sum();
    }
    Matrix d_act = d_out * L.ff_out;
    Matrix d_pre = d_act.cwiseProduct(lt.ff_pre.unaryExpr([](double x) { return gelu_grad(x); }));
    if (gl != nullptr) {
      gl->ff_in.noalias() += d_pre.transpose() * lt.ln2_out;
      gl->ff_in_bias += d_pre.colwise().sum();
    }
    Matrix d_ln2 = d_pre * L.ff_in;
    Matrix d_mid = d_out + layer_norm_backward(d_ln2, L.ln2_gain, lt.ln2,
                                               gl ? &gl->ln2_gain : nullptr,
                                               gl ? &gl->ln2_bias : nullptr);

    // Attention branch.
    if (gl != nullptr) gl->wo.noalias() += d_mid.transpose() * lt.attn;
    const Matrix d_attn = d_mid * L.wo;
    Matrix dq(T, c.d_model), dk(T, c.d_model), dv(T, c.d_model);
    for (int hd = 0; hd < H; ++hd) {
      const Matrix& p = lt.probs[hd];
      const auto d_attn_h = d_attn.middleCols(hd * dh, dh);
      Matrix dp = d_attn_h * lt.v.middleCols(hd * dh, dh).transpose();
      dv.middleCols(hd * dh, dh) = p.transpose() * d_attn_h;
      Matrix ds = Matrix::Zero(T, T);
      for (Eigen::Index i = 0; i < T; ++i) {
        const double dot = p.row(i).head(i + 1).dot(dp.row(i).head(i + 1));
        for (Eigen::Index j = 0; j <= i; ++j) ds(i, j) = p(i, j) * (dp(i, j) - dot);
      }
      ds *= scale;
      dq.middleCols(hd * dh, dh) = ds * lt.k.middleCols(hd * dh, dh);
      dk.middleCols(hd * dh, dh) = ds.transpose() * lt.q.middleCols(hd * dh, dh);
    }

    const Matrix& a = lt.ln1_out;
    Matrix d_a = dq * L.wq + dk * L.wk + dv * L.wv;
    if (gl != nullptr) {
      gl->wq.noalias() += dq.transpose() * a;
      gl->wk.noalias() += dk.transpose() * a;
      gl->wv.noalias() += dv.transpose() * a;
    }
    if (lora != nullptr) {
      // Gradient order per layer: q.a, q.b, v.a, v.b.
      const std::pair<const LoraAdapter*, std::pair<const Matrix*, const Matrix*>> adapters[2] = {
          {&lora->query[l], {&dq, &lt.q_lora}}, {&lora->value[l], {&dv, &lt.v_lora}}};
      for (int which = 0; which < 2; ++which) {
        const LoraAdapter& ad = *adapters[which].first;
        const Matrix& dy = *adapters[which].second.first;
        const Matrix& xa = *adapters[which].second.second;
        const double s = ad.scale();
        Matrix& g_a = g.lora[4 * l + 2 * which];
        Matrix& g_b = g.lora[4 * l + 2 * which + 1];
        g_b.noalias() += s * (dy.transpose() * xa);
        const Matrix d_xa = s * (dy * ad.b);
        g_a.noalias() += d_xa.transpose() * a;
        d_a.noalias() += d_xa * ad.a;
      }
    }
    dh_mat = d_mid + layer_norm_backward(d_a, L.ln1_gain, lt.ln1, gl ? &gl->ln1_gain : nullptr,
                                         gl ? &gl->ln1_bias : nullptr);
  }
  g.inputs = dh_mat;
  if (gw != nullptr) gw->position_embedding.topRows(T) += dh_mat;
}

MaskedLoss masked_cross_entropy(const Matrix& logits, const std::vector<TokenId>& targets) {
  require(static_cast<Eigen::Index>(targets.size()) == logits.rows(),
          "target count does not match logit rows");
  MaskedLoss out;
  out.d_logits = Matrix::Zero(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const TokenId y = targets[t];
    if (y < 0) continue;
    require(y < logits.cols(), "target token outside the logit range");
    const Vector lsm = log_softmax(logits.row(t));
    out.loss -= lsm[y];
    ++out.count;
    Eigen::Index best = 0;
    for (Eigen::Index v = 1; v < lsm.size(); ++v) {
      if (lsm[v] > lsm[best]) best = v;
    }
    if (best == y) ++out.correct;
    out.d_logits.row(t) = lsm.array().exp().matrix().transpose();
    out.d_logits(t, y) -= 1.0;
  }
  if (out.count > 0) {
    out.loss /= out.count;
    out.d_logits /= out.count;
  }
  return out;
}

}  // namespace slamkit
