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

#include "slamkit/run_config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "slamkit/error.hpp"
#include "slamkit/parallel.hpp"

namespace slamkit {

namespace {

using nlohmann::ordered_json;

ordered_json bounds_json(const SweepBounds& b) {
  return {{"min", b.min}, {"max", b.max}, {"step", b.step}};
}

ordered_json train_json(const TrainConfig& t) {
  return {{"learning_rate", t.learning_rate}, {"batch_size", t.batch_size},
          {"max_epochs", t.max_epochs},       {"weight_decay", t.weight_decay},
          {"beta1", t.beta1},                 {"beta2", t.beta2},
          {"epsilon", t.epsilon},             {"patience", t.patience},
          {"precision", to_string(t.precision)}};
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["system"] = to_string(c.system);
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir;
  j["vocab"] = {{"kind", c.vocab.kind}, {"size", c.vocab.size}};
  j["lm"] = {{"d_model", c.lm.d_model}, {"n_layers", c.lm.n_layers}, {"n_heads", c.lm.n_heads},
             {"d_ff", c.lm.d_ff},       {"max_seq_len", c.lm.max_seq_len}};
  ordered_json pt = train_json(c.pretrain.config.train);
  pt["target_accuracy"] = c.pretrain.config.target_accuracy;
  pt["min_accuracy"] = c.pretrain.config.min_accuracy;
  pt["final_lr_fraction"] = c.pretrain.config.final_lr_fraction;
  pt["train_size"] = c.pretrain.train_size;
  pt["dev_size"] = c.pretrain.dev_size;
  pt["min_len"] = c.pretrain.min_len;
  pt["max_len"] = c.pretrain.max_len;
  j["pretrain"] = pt;
  j["projector"] = {{"hidden", c.projector_hidden}, {"k", c.k}};
  j["lora"] = {{"rank", c.lora.rank}, {"alpha", c.lora.alpha}};
  j["train"] = train_json(c.train);
  j["corpus"] = {{"d_enc", c.corpus.d_enc},           {"train_size", c.corpus.train_size},
                 {"dev_size", c.corpus.dev_size},     {"test_size", c.corpus.test_size},
                 {"min_len", c.corpus.min_len},       {"max_len", c.corpus.max_len},
                 {"rate_mean", c.corpus.rate.mean},   {"rate_spread", c.corpus.rate.spread},
                 {"noise_sigma", c.corpus.noise_sigma}};
  j["decode"] = {{"beam_width", c.decode.beam_width}, {"max_len", c.decode.max_len}};
  j["sweep"] = {{"kind", to_string(c.sweep.kind)},
                {"bounds", c.sweep.bounds ? bounds_json(*c.sweep.bounds) : ordered_json(nullptr)},
                {"noise_class", to_string(c.sweep.noise_class)}};
  j["eval"] = {{"runaway_factor", c.runaway_factor}, {"n_mels", c.n_mels},
               {"train_tag", c.train_tag},           {"eval_tag", c.eval_tag}};
  j["manifests"] = {{"train", c.manifests.train}, {"dev", c.manifests.dev},
                    {"test", c.manifests.test},   {"noise", c.manifests.noise}};
  return j;
}

bool same_kind(const ordered_json& schema, const ordered_json& v) {
  if (schema.is_number_integer() || schema.is_number_unsigned()) return v.is_number_integer();
  if (schema.is_number()) return v.is_number();
  if (schema.is_string()) return v.is_string();
  if (schema.is_boolean()) return v.is_boolean();
  if (schema.is_object()) return v.is_object();
  return true;
}

// Overlays `user` onto the fully defaulted `base`, rejecting unknown keys.
void merge(ordered_json& base, const ordered_json& user, const std::string& path) {
  if (!user.is_object()) throw ValidationError("config " + (path.empty() ? "root" : path) + " must be an object");
  for (const auto& [key, value] : user.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) throw ValidationError("unknown config key '" + here + "'");
    ordered_json& slot = base[key];
    if (here == "sweep.bounds") {
      if (value.is_null()) {
        slot = nullptr;
        continue;
      }
      ordered_json b = bounds_json({0.0, 0.0, 0.0});
      merge(b, value, here);
      for (const char* k : {"min", "max", "step"}) {
        if (!value.contains(k)) throw ValidationError("config key '" + here + "." + k + "' is required");
      }
      slot = b;
      continue;
    }
    if (slot.is_object()) {
      merge(slot, value, here);
    } else if (!same_kind(slot, value)) {
      throw ValidationError("config key '" + here + "' has the wrong type");
    } else {
      slot = value;
    }
  }
}

TrainConfig train_from(const ordered_json& j) {
  TrainConfig t;
  t.learning_rate = j.at("learning_rate").get<double>();
  t.batch_size = j.at("batch_size").get<int>();
  t.max_epochs = j.at("max_epochs").get<int>();
  t.weight_decay = j.at("weight_decay").get<double>();
  t.beta1 = j.at("beta1").get<double>();
  t.beta2 = j.at("beta2").get<double>();
  t.epsilon = j.at("epsilon").get<double>();
  t.patience = j.at("patience").get<int>();
  t.precision = parse_precision(j.at("precision").get<std::string>());
  return t;
}

RunConfig from_json(const ordered_json& j) {
  RunConfig c;
  c.system = parse_system_kind(j.at("system").get<std::string>());
  if (j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() < 0) {
    throw ValidationError("config key 'seed' must be non-negative");
  }
  c.seed = j.at("seed").get<std::uint64_t>();
  c.workers = j.at("workers").get<int>();
  c.output_dir = j.at("output_dir").get<std::string>();
  c.vocab.kind = j.at("vocab").at("kind").get<std::string>();
  c.vocab.size = j.at("vocab").at("size").get<int>();
  const auto& lm = j.at("lm");
  c.lm.d_model = lm.at("d_model").get<int>();
  c.lm.n_layers = lm.at("n_layers").get<int>();
  c.lm.n_heads = lm.at("n_heads").get<int>();
  c.lm.d_ff = lm.at("d_ff").get<int>();
  c.lm.max_seq_len = lm.at("max_seq_len").get<int>();
  const auto& pt = j.at("pretrain");
  c.pretrain.config.train = train_from(pt);
  c.pretrain.config.target_accuracy = pt.at("target_accuracy").get<double>();
  c.pretrain.config.min_accuracy = pt.at("min_accuracy").get<double>();
  c.pretrain.config.final_lr_fraction = pt.at("final_lr_fraction").get<double>();
  c.pretrain.train_size = pt.at("train_size").get<int>();
  c.pretrain.dev_size = pt.at("dev_size").get<int>();
  c.pretrain.min_len = pt.at("min_len").get<int>();
  c.pretrain.max_len = pt.at("max_len").get<int>();
  c.projector_hidden = j.at("projector").at("hidden").get<int>();
  c.k = j.at("projector").at("k").get<int>();
  c.lora.rank = j.at("lora").at("rank").get<int>();
  c.lora.alpha = j.at("lora").at("alpha").get<double>();
  c.train = train_from(j.at("train"));
  const auto& co = j.at("corpus");
  c.corpus.d_enc = co.at("d_enc").get<int>();
  c.corpus.train_size = co.at("train_size").get<int>();
  c.corpus.dev_size = co.at("dev_size").get<int>();
  c.corpus.test_size = co.at("test_size").get<int>();
  c.corpus.min_len = co.at("min_len").get<int>();
  c.corpus.max_len = co.at("max_len").get<int>();
  c.corpus.rate.mean = co.at("rate_mean").get<int>();
  c.corpus.rate.spread = co.at("rate_spread").get<int>();
  c.corpus.noise_sigma = co.at("noise_sigma").get<double>();
  c.decode.beam_width = j.at("decode").at("beam_width").get<int>();
  c.decode.max_len = j.at("decode").at("max_len").get<int>();
  const auto& sw = j.at("sweep");
  c.sweep.kind = parse_perturb_kind(sw.at("kind").get<std::string>());
  if (!sw.at("bounds").is_null()) {
    const auto& b = sw.at("bounds");
    c.sweep.bounds = SweepBounds{b.at("min").get<double>(), b.at("max").get<double>(),
                                 b.at("step").get<double>()};
  }
  c.sweep.noise_class = parse_noise_class(sw.at("noise_class").get<std::string>());
  const auto& ev = j.at("eval");
  c.runaway_factor = ev.at("runaway_factor").get<double>();
  c.n_mels = ev.at("n_mels").get<int>();
  c.train_tag = ev.at("train_tag").get<std::string>();
  c.eval_tag = ev.at("eval_tag").get<std::string>();
  const auto& m = j.at("manifests");
  c.manifests = {m.at("train").get<std::string>(), m.at("dev").get<std::string>(),
                 m.at("test").get<std::string>(), m.at("noise").get<std::string>()};
  c.lm.vocab_size = c.vocab.build().size();
  return c;
}

RunConfig from_user_json(const ordered_json& user) {
  ordered_json base = to_json(RunConfig{});
  merge(base, user, "");
  RunConfig c;
  try {
    c = from_json(base);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("invalid config value: ") + e.what());
  }
  validate(c);
  return c;
}

}  // namespace

std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::kConnector: return "connector";
    case SystemKind::kConnectorLora: return "connector+lora";
    case SystemKind::kCtc: return "ctc";
  }
  return "connector";
}

SystemKind parse_system_kind(const std::string& s) {
  if (s == "connector") return SystemKind::kConnector;
  if (s == "connector+lora") return SystemKind::kConnectorLora;
  if (s == "ctc") return SystemKind::kCtc;
  throw ValidationError("unknown system '" + s + "' (expected connector, connector+lora or ctc)");
}

Vocabulary VocabConfig::build() const {
  if (kind == "synthetic") return Vocabulary::synthetic(size);
  if (kind == "characters") return Vocabulary::characters();
  throw ValidationError("unknown vocab kind '" + kind + "' (expected synthetic or characters)");
}

std::vector<PerturbCondition> SweepSection::grid(std::uint64_t seed) const {
  const SweepBounds b = bounds.value_or(kind == PerturbKind::kTempo ? kDefaultTempoBounds
                                                                     : kDefaultNoiseBounds);
  return make_grid(kind, b, noise_class, seed);
}

int RunConfig::resolved_workers() const { return workers > 0 ? workers : default_workers(); }

RunConfig parse_run_config(const std::string& text) {
  ordered_json user;
  try {
    user = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_user_json(user);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open config " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_run_config(os.str());
}

std::string dump_run_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

RunConfig apply_overrides(const RunConfig& c, const std::vector<std::string>& assignments) {
  ordered_json j = to_json(c);
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ValidationError("override '" + a + "' is not of the form key=value");
    }
    const std::string key = a.substr(0, eq);
    const std::string raw = a.substr(eq + 1);
    ordered_json value;
    try {
      value = ordered_json::parse(raw);
    } catch (const nlohmann::json::parse_error&) {
      value = raw;
    }
    // Build the nested object for the dotted path and merge it.
    ordered_json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t p; (p = rest.find('.')) != std::string::npos; rest = rest.substr(p + 1)) {
      parts.push_back(rest.substr(0, p));
    }
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = ordered_json{{*it, patch}};
    ordered_json base = to_json(RunConfig{});
    merge(base, j, "");
    merge(base, patch, "");
    j = base;
  }
  return from_user_json(j);
}

void validate(const RunConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
  };
  check(c.workers >= 0, "workers must be >= 0");
  check(c.vocab.kind == "synthetic" || c.vocab.kind == "characters",
        "vocab.kind must be 'synthetic' or 'characters'");
  if (c.vocab.kind == "synthetic") {
    check(c.vocab.size > Vocabulary::kSyntheticReserved,
          "vocab.size must exceed the " + std::to_string(Vocabulary::kSyntheticReserved) +
              " reserved prompt/special tokens");
  }
  check(c.lm.d_model >= 1 && c.lm.n_layers >= 1 && c.lm.n_heads >= 1 && c.lm.d_ff >= 1,
        "lm dimensions must be positive");
  check(c.lm.d_model % c.lm.n_heads == 0, "lm.d_model must be divisible by lm.n_heads");
  check(c.lm.max_seq_len >= 16, "lm.max_seq_len must be >= 16");
  check(c.projector_hidden >= 1, "projector.hidden must be >= 1");
  check(c.k >= 1, "projector.k must be >= 1");
  check(c.lora.rank >= 1, "lora.rank must be >= 1");
  check(c.corpus.d_enc >= 1, "corpus.d_enc must be >= 1");
  check(c.corpus.train_size >= 1 && c.corpus.dev_size >= 0 && c.corpus.test_size >= 0,
        "corpus sizes must be non-negative (train >= 1)");
  check(c.corpus.min_len >= 1 && c.corpus.max_len >= c.corpus.min_len,
        "corpus length range is invalid");
  check(c.corpus.rate.mean >= 1, "corpus.rate_mean must be >= 1");
  check(c.corpus.rate.spread >= 0 && c.corpus.rate.spread < c.corpus.rate.mean,
        "corpus.rate_spread must lie in [0, rate_mean)");
  check(c.corpus.noise_sigma >= 0.0, "corpus.noise_sigma must be >= 0");
  check(c.pretrain.train_size >= 1 && c.pretrain.dev_size >= 0, "pretrain sizes are invalid");
  check(c.pretrain.min_len >= 1 && c.pretrain.max_len >= c.pretrain.min_len,
        "pretrain length range is invalid");
  check(c.decode.beam_width >= 1 && c.decode.max_len >= 1, "decode settings must be >= 1");
  check(c.runaway_factor > 0.0, "eval.runaway_factor must be > 0");
  check(c.n_mels >= 1, "eval.n_mels must be >= 1");
  try {
    slamkit::validate(c.train);
    slamkit::validate(c.pretrain.config.train);
  } catch (const PreconditionError& e) {
    throw ValidationError(std::string("invalid training settings: ") + e.what());
  }
}

}  // namespace slamkit
