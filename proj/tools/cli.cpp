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

#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "slamkit/analysis.hpp"
#include "slamkit/audio.hpp"
#include "slamkit/checkpoint.hpp"
#include "slamkit/error.hpp"
#include "slamkit/eval.hpp"
#include "slamkit/manifest.hpp"
#include "slamkit/pipeline.hpp"
#include "slamkit/report.hpp"
#include "slamkit/run_config.hpp"
#include "slamkit/selftest.hpp"

namespace slamkit::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Flags shared by every subcommand.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  bool overwrite = false;
  std::vector<std::string> sets;
};

// Subcommand-specific inputs; unused fields stay empty.
struct Inputs {
  std::string lm, projector, lora, ctc;
  std::string data, manifest, in;
  std::string splits = "train,dev,test";
  bool audio = false;
  std::string kind;
  std::optional<double> value;
  std::string noise_class;
  std::string utterance;
  bool oracle = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "RunConfig JSON file")->check(CLI::ExistingFile);
  sub->add_option("--seed", c.seed, "Run seed (overrides the config)");
  sub->add_option("--workers", c.workers, "Worker threads; 0 uses every processor")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--out", c.out, "Output directory");
  sub->add_flag("--overwrite", c.overwrite, "Write into a non-empty output directory");
  sub->add_option("--set", c.sets, "Override one config key, e.g. --set train.max_epochs=5");
}

std::string output_root(const RunConfig& c) {
  if (!c.output_dir.empty()) return c.output_dir;
  if (const char* env = std::getenv(kOutputRootEnv); env != nullptr && *env != '\0') return env;
  return "slamkit-out";
}

class Context {
 public:
  Context(const std::string& name, const Common& common, std::ostream& out)
      : name_(name), common_(common), out_(out) {
    config_ = common.config.empty() ? RunConfig{} : load_run_config(common.config);
    config_ = apply_overrides(config_, common.sets);
    if (common.seed) config_.seed = *common.seed;
    if (common.workers) config_.workers = *common.workers;
  }

  RunConfig& config() { return config_; }
  std::ostream& log() { return out_; }
  std::string root() const { return output_root(config_); }
  std::string default_input(const std::string& sub, const std::string& file) const {
    return (fs::path(root()) / sub / file).string();
  }

  // Validates the config and claims the output directory, refusing a
  // non-empty one without --overwrite.
  const fs::path& open_output() {
    validate(config_);
    dir_ = common_.out.empty() ? fs::path(root()) / name_ : fs::path(common_.out);
    std::error_code ec;
    if (fs::exists(dir_, ec)) {
      if (!fs::is_directory(dir_)) throw ValidationError("output path " + dir_.string() + " is not a directory");
      if (!fs::is_empty(dir_) && !common_.overwrite) {
        throw ValidationError("output directory " + dir_.string() +
                              " is not empty; pass --overwrite to reuse it");
      }
    }
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
    write("config.json", dump_run_config(config_) + "\n");
    return dir_;
  }

  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  // Like path(), creating parent directories.
  std::string file(const std::string& rel) const {
    const fs::path p = dir_ / rel;
    fs::create_directories(p.parent_path());
    return p.string();
  }

  void write(const std::string& rel, const std::string& text) const {
    const fs::path p = dir_ / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + p.string() + " for writing");
    f << text;
    if (!f) throw IoError("failed writing " + p.string());
  }

 private:
  std::string name_;
  Common common_;
  std::ostream& out_;
  RunConfig config_;
  fs::path dir_;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

LogMelConfig frontend(const RunConfig& c) {
  LogMelConfig f;
  f.n_mels = c.n_mels;
  return f;
}

// Manifest of a named split: the config's manifests section wins, otherwise
// <data>/<split>.jsonl with <data> defaulting to the synth output.
std::string split_manifest(Context& ctx, const Inputs& in, const std::string& split) {
  const ManifestPaths& m = ctx.config().manifests;
  const std::string& configured = split == "train" ? m.train : split == "dev" ? m.dev : m.test;
  if (!configured.empty()) return configured;
  const std::string data = in.data.empty() ? (fs::path(ctx.root()) / "synth").string() : in.data;
  return (fs::path(data) / (split + ".jsonl")).string();
}

std::vector<EvalItem> load_items(const std::string& manifest_path, int sample_rate) {
  const Manifest m = parse_manifest(manifest_path);
  std::vector<EvalItem> items;
  items.reserve(m.records.size());
  for (const auto& r : m.records) {
    EvalItem item;
    item.id = r.utterance_id;
    item.reference = r.reference;
    if (r.feature_path) {
      item.frames = read_feature_file(*r.feature_path);
    } else {
      Waveform w = read_wav_file(*r.audio_path);
      if (!w.is_mono()) w = downmix(w);
      if (w.sample_rate() != sample_rate) w = resample(w, sample_rate);
      item.audio = std::move(w);
    }
    items.push_back(std::move(item));
  }
  return items;
}

FrameSequence item_frames(const EvalItem& item, const LogMelConfig& fe) {
  return item.frames ? *item.frames : logmel_frontend(*item.audio, fe);
}

std::vector<ConnectorExample> connector_examples(const std::vector<EvalItem>& items,
                                                 const Vocabulary& vocab, const LogMelConfig& fe,
                                                 int k) {
  std::vector<ConnectorExample> out;
  out.reserve(items.size());
  for (const auto& it : items) {
    out.push_back(connector_example(it.id, item_frames(it, fe), vocab.encode_text(it.reference), k));
  }
  return out;
}

std::vector<CtcExample> ctc_examples(const std::vector<EvalItem>& items, const Vocabulary& vocab,
                                     const LogMelConfig& fe) {
  std::vector<CtcExample> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back({item_frames(it, fe), vocab.encode_text(it.reference)});
  return out;
}

NoiseBank load_noise_bank(const RunConfig& c, int sample_rate) {
  NoiseBank bank;
  if (c.manifests.noise.empty()) return bank;
  for (const auto& r : parse_noise_manifest(c.manifests.noise)) {
    Waveform w = read_wav_file(r.audio_path);
    if (!w.is_mono()) w = downmix(w);
    if (w.sample_rate() != sample_rate) w = resample(w, sample_rate);
    bank.sources[r.noise_class] = std::move(w);
  }
  return bank;
}

ToyLM load_lm(const std::string& path) {
  ToyLM lm = lm_from_checkpoint(load_checkpoint(path));
  if (!lm.frozen()) throw ValidationError(path + " holds an unfrozen LM; run pretrain-lm first");
  return lm;
}

std::string epochs_json(const std::vector<EpochLog>& log) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : log) {
    ordered_json j;
    j["epoch"] = e.epoch;
    j["train_loss"] = e.train_loss;
    j["dev_loss"] = e.dev_loss;
    j["dev_accuracy"] = e.dev_accuracy;
    arr.push_back(j);
  }
  return arr.dump();
}

// A loaded ASR system with the models it references.
struct LoadedSystem {
  std::unique_ptr<ToyLM> lm;
  std::unique_ptr<Projector> projector;
  std::unique_ptr<LoraSet> lora;
  std::unique_ptr<CtcHead> head;
  std::unique_ptr<Vocabulary> vocab;
  std::unique_ptr<AsrSystem> system;
  int k = 0;
};

LoadedSystem load_system(Context& ctx, const Inputs& in) {
  const RunConfig& c = ctx.config();
  LoadedSystem s;
  if (c.system == SystemKind::kCtc) {
    const std::string path = in.ctc.empty() ? ctx.default_input("train-ctc", "ctc.ckpt") : in.ctc;
    s.head = std::make_unique<CtcHead>(ctc_head_from_checkpoint(load_checkpoint(path)));
    s.vocab = std::make_unique<Vocabulary>(c.vocab.build());
    if (s.head->n_classes() != s.vocab->size()) {
      throw ValidationError("CTC head has " + std::to_string(s.head->n_classes()) +
                            " classes but the vocabulary has " + std::to_string(s.vocab->size()));
    }
    s.system = std::make_unique<CtcSystem>(*s.head, *s.vocab);
    return s;
  }
  s.lm = std::make_unique<ToyLM>(load_lm(in.lm.empty() ? ctx.default_input("pretrain-lm", "lm.ckpt") : in.lm));
  const std::string proj = in.projector.empty() ? ctx.default_input("train", "projector.ckpt") : in.projector;
  s.projector = std::make_unique<Projector>(projector_from_checkpoint(load_checkpoint(proj), &s.k));
  if (c.system == SystemKind::kConnectorLora) {
    const std::string lp =
        in.lora.empty() ? (fs::path(proj).parent_path() / "lora.ckpt").string() : in.lora;
    s.lora = std::make_unique<LoraSet>(lora_from_checkpoint(load_checkpoint(lp)));
  }
  s.system = std::make_unique<ConnectorSystem>(*s.lm, *s.projector, s.k, s.lora.get(), PromptLayout{},
                                               c.decode);
  return s;
}

std::string eval_manifest(Context& ctx, const Inputs& in) {
  return in.manifest.empty() ? split_manifest(ctx, in, "test") : in.manifest;
}

EvalOptions eval_options(const RunConfig& c) {
  EvalOptions o;
  o.frontend = frontend(c);
  o.noise = load_noise_bank(c, o.frontend.sample_rate);
  o.workers = c.resolved_workers();
  o.runaway_factor = c.runaway_factor;
  return o;
}

std::string hypotheses_text(const std::vector<UtteranceResult>& records, const Vocabulary& vocab) {
  std::string s;
  for (const auto& r : records) s += r.id + '\t' + r.condition + '\t' + vocab.decode_text(r.hypothesis) + '\n';
  return s;
}

// ---- subcommands ---------------------------------------------------------

int cmd_synth(Context& ctx, const Inputs& in) {
  const RunConfig& c = ctx.config();
  const ToyLM lm = load_lm(in.lm.empty() ? ctx.default_input("pretrain-lm", "lm.ckpt") : in.lm);
  ctx.open_output();
  const ToyCorpusSpec spec = toy_corpus_spec(lm, c);
  const std::map<std::string, int> sizes = {
      {"train", c.corpus.train_size}, {"dev", c.corpus.dev_size}, {"test", c.corpus.test_size}};
  for (const auto& split : split_list(in.splits)) {
    const auto it = sizes.find(split);
    if (it == sizes.end()) throw ValidationError("unknown split '" + split + "' (expected train, dev, test)");
    const auto samples = synth_split(lm, spec, c, split, it->second, c.corpus.rate);
    Manifest features, audio;
    for (const auto& s : samples) {
      const std::string text = lm.vocab().decode_text(s.utterance.reference_tokens);
      const std::string fp = "features/" + split + "/" + s.id + ".skft";
      write_feature_file(ctx.file(fp), s.utterance.frames);
      features.records.push_back({s.id, std::nullopt, fp, text, s.utterance.frames.duration_seconds(), 0});
      if (in.audio) {
        const std::string ap = "audio/" + split + "/" + s.id + ".wav";
        const Waveform w = synth_tone_waveform(s.utterance.reference_tokens, s.utterance.frames_per_token,
                                               lm.vocab().content_tokens());
        write_wav_file(ctx.file(ap), w);
        audio.records.push_back({s.id, ap, std::nullopt, text, w.duration_seconds(), 0});
      }
    }
    write_manifest(ctx.path(split + ".jsonl"), features);
    if (in.audio) write_manifest(ctx.path(split + ".audio.jsonl"), audio);
    ctx.log() << split << ": " << samples.size() << " utterances\n";
  }
  return kExitOk;
}

int cmd_pretrain(Context& ctx, const Inputs&) {
  const RunConfig& c = ctx.config();
  ctx.open_output();
  const Vocabulary vocab = c.vocab.build();
  const PretrainResult r = pretrain_toy_lm(lm_config(c), vocab, pretrain_corpus(c, vocab), pretrain_config(c));
  save_checkpoint(ctx.path("lm.ckpt"), to_checkpoint(r.lm));
  ctx.write("pretrain.log", format_run_log(r.log));
  ordered_json j;
  j["dev_accuracy"] = r.dev_accuracy;
  j["dev_exact_match"] = r.dev_exact_match;
  j["lm_checksum"] = r.lm.frozen_checksum();
  j["epochs"] = ordered_json::parse(epochs_json(r.log));
  ctx.write("pretrain.json", j.dump(2) + "\n");
  ctx.log() << "pretrained LM: dev accuracy " << r.dev_accuracy << ", oracle exact match "
            << r.dev_exact_match << "\n";
  return kExitOk;
}

int cmd_train(Context& ctx, const Inputs& in) {
  const RunConfig& c = ctx.config();
  if (c.system == SystemKind::kCtc) throw ValidationError("system 'ctc' is trained with train-ctc");
  const ToyLM lm = load_lm(in.lm.empty() ? ctx.default_input("pretrain-lm", "lm.ckpt") : in.lm);
  ctx.open_output();
  const LogMelConfig fe = frontend(c);
  const auto train = connector_examples(load_items(split_manifest(ctx, in, "train"), fe.sample_rate),
                                        lm.vocab(), fe, c.k);
  const auto dev = connector_examples(load_items(split_manifest(ctx, in, "dev"), fe.sample_rate),
                                      lm.vocab(), fe, c.k);
  ConnectorOptions opt;
  opt.hidden = c.projector_hidden;
  if (c.system == SystemKind::kConnectorLora) opt.lora = c.lora;
  opt.last_good_path = ctx.path("last_good.ckpt");
  const ConnectorResult r = train_projector(lm, train, dev, connector_train_config(c), opt);
  save_checkpoint(ctx.path("projector.ckpt"), to_checkpoint(r.projector, c.k));
  if (r.lora) save_checkpoint(ctx.path("lora.ckpt"), to_checkpoint(*r.lora));
  ctx.write("train.log", format_run_log(r.log));
  ordered_json j;
  j["system"] = to_string(c.system);
  j["best_epoch"] = r.best_epoch;
  j["lm_checksum"] = lm.frozen_checksum();
  j["epochs"] = ordered_json::parse(epochs_json(r.log));
  ctx.write("train.json", j.dump(2) + "\n");
  ctx.log() << "trained " << to_string(c.system) << " on " << train.size() << " utterances; best epoch "
            << r.best_epoch << "\n";
  return kExitOk;
}

int cmd_train_ctc(Context& ctx, const Inputs& in) {
  RunConfig& c = ctx.config();
  c.system = SystemKind::kCtc;
  ctx.open_output();
  const Vocabulary vocab = c.vocab.build();
  const LogMelConfig fe = frontend(c);
  const auto train = ctc_examples(load_items(split_manifest(ctx, in, "train"), fe.sample_rate), vocab, fe);
  const auto dev = ctc_examples(load_items(split_manifest(ctx, in, "dev"), fe.sample_rate), vocab, fe);
  const CtcTrainResult r = train_ctc_baseline(train, dev, vocab.size(), ctc_train_config(c));
  save_checkpoint(ctx.path("ctc.ckpt"), to_checkpoint(r.head));
  ctx.write("ctc.log", format_run_log(r.log));
  ordered_json j;
  j["skipped"] = r.skipped;
  j["trained_epochs"] = r.head.trained_epochs;
  j["epochs"] = ordered_json::parse(epochs_json(r.log));
  ctx.write("ctc.json", j.dump(2) + "\n");
  ctx.log() << "trained CTC baseline on " << train.size() << " utterances (" << r.skipped
            << " infeasible skipped)\n";
  return kExitOk;
}

PerturbCondition single_condition(const RunConfig& c, const Inputs& in) {
  if (!in.value) throw ValidationError("perturb needs --value");
  const PerturbKind kind = in.kind.empty() ? c.sweep.kind : parse_perturb_kind(in.kind);
  if (kind == PerturbKind::kTempo) return PerturbCondition::tempo(*in.value);
  const NoiseClass cls = in.noise_class.empty() ? c.sweep.noise_class : parse_noise_class(in.noise_class);
  return PerturbCondition::noise(*in.value, cls, substream_seed(c.seed, "noise-offset"));
}

int cmd_perturb(Context& ctx, const Inputs& in) {
  const RunConfig& c = ctx.config();
  const PerturbCondition cond = single_condition(c, in);
  const std::string manifest = eval_manifest(ctx, in);
  ctx.open_output();
  const LogMelConfig fe = frontend(c);
  const NoiseBank bank = load_noise_bank(c, fe.sample_rate);
  Manifest outm;
  for (const auto& item : load_items(manifest, fe.sample_rate)) {
    if (item.audio) {
      const Waveform w = perturb_waveform(*item.audio, item.id, cond, bank);
      const std::string ap = "audio/" + item.id + ".wav";
      write_wav_file(ctx.file(ap), w);
      outm.records.push_back({item.id, ap, std::nullopt, item.reference, w.duration_seconds(), 0});
    } else {
      const FrameSequence f = perturb_frames(*item.frames, item.id, cond);
      const std::string fp = "features/" + item.id + ".skft";
      write_feature_file(ctx.file(fp), f);
      outm.records.push_back({item.id, std::nullopt, fp, item.reference, f.duration_seconds(), 0});
    }
  }
  write_manifest(ctx.path("manifest.jsonl"), outm);
  ctx.log() << "perturbed " << outm.records.size() << " utterances at " << cond.label() << "\n";
  return kExitOk;
}

int cmd_eval(Context& ctx, const Inputs& in) {
  const RunConfig& c = ctx.config();
  LoadedSystem s = load_system(ctx, in);
  const std::string manifest = eval_manifest(ctx, in);
  ctx.open_output();
  const EvalOptions opt = eval_options(c);
  const auto records = evaluate(*s.system, load_items(manifest, opt.frontend.sample_rate), opt);
  std::vector<WerReport> reports;
  int runaway = 0;
  for (const auto& r : records) {
    reports.push_back(r.report);
    runaway += r.runaway ? 1 : 0;
  }
  const WerReport pooled = pool_reports(reports);
  std::ostringstream utt, agg;
  write_utterance_csv(utt, records);
  agg << "condition,pooled_wer,runaway_count\n"
      << "none," << csv_number(pooled.wer()) << ',' << runaway << '\n';
  ctx.write("utterances.csv", utt.str());
  ctx.write("aggregate.csv", agg.str());
  ctx.write("hypotheses.txt", hypotheses_text(records, s.system->vocab()));
  write_eval_marker(ctx.path(""), to_string(c.system), c.train_tag, c.eval_tag);
  ctx.log() << "WER " << pooled.displayed() << " over " << records.size() << " utterances (S"
            << pooled.substitutions << " D" << pooled.deletions << " I" << pooled.insertions << ", "
            << runaway << " runaway)\n";
  return kExitOk;
}

int cmd_sweep(Context& ctx, const Inputs& in) {
  RunConfig& c = ctx.config();
  if (!in.kind.empty()) {
    const PerturbKind kind = parse_perturb_kind(in.kind);
    if (kind != c.sweep.kind) c.sweep.bounds.reset();
    c.sweep.kind = kind;
  }
  if (!in.noise_class.empty()) c.sweep.noise_class = parse_noise_class(in.noise_class);
  LoadedSystem s = load_system(ctx, in);
  const std::string manifest = eval_manifest(ctx, in);
  ctx.open_output();
  const EvalOptions opt = eval_options(c);
  const SweepCurve curve =
      run_sweep(*s.system, load_items(manifest, opt.frontend.sample_rate), c.sweep.grid(c.seed), opt);
  std::ostringstream agg, utt, fits;
  write_aggregate_csv(agg, curve);
  write_utterance_csv(utt, curve.records);
  ctx.write("aggregate.csv", agg.str());
  ctx.write("utterances.csv", utt.str());
  fits << "condition,n,slope,correlation,degenerate\n";
  for (const auto& cond : curve.conditions) {
    const ScatterFit fit = duration_scatter(curve, cond.label());
    std::ostringstream sc;
    write_scatter_csv(sc, fit);
    ctx.write("scatter/" + cond.label() + ".csv", sc.str());
    fits << cond.label() << ',' << fit.points.size() << ',' << csv_number(fit.slope) << ','
         << csv_number(fit.correlation) << ',' << (fit.degenerate ? 1 : 0) << '\n';
  }
  ctx.write("scatter_fit.csv", fits.str());
  write_sweep_marker(ctx.path(""), to_string(c.system), c.sweep.kind);
  for (std::size_t i = 0; i < curve.conditions.size(); ++i) {
    ctx.log() << curve.conditions[i].label() << "  WER " << curve.aggregates[i].displayed() << "  runaway "
              << curve.runaway_counts[i] << "\n";
  }
  return kExitOk;
}

int cmd_align(Context& ctx, const Inputs& in) {
  const RunConfig& c = ctx.config();
  if (in.utterance.empty()) throw ValidationError("align needs --utterance");
  const ToyLM lm = load_lm(in.lm.empty() ? ctx.default_input("pretrain-lm", "lm.ckpt") : in.lm);
  const LogMelConfig fe = frontend(c);
  std::optional<EvalItem> item;
  for (auto& it : load_items(eval_manifest(ctx, in), fe.sample_rate)) {
    if (it.id == in.utterance) item = std::move(it);
  }
  if (!item) throw ValidationError("utterance '" + in.utterance + "' is not in the manifest");
  const TokenSequence reference = lm.vocab().encode_text(item->reference);

  AlignmentOptions opt;
  opt.decode = c.decode;
  AlignmentBundle bundle;
  if (in.oracle) {
    // True embeddings through the identity projector, one row per token.
    opt.allow_untrained = true;
    FrameSequence frames;
    frames.frames = lm.embed(reference);
    bundle = alignment_report(lm, Projector::identity(lm.d_model()), 1, nullptr, frames, reference, opt);
  } else {
    const std::string proj =
        in.projector.empty() ? ctx.default_input("train", "projector.ckpt") : in.projector;
    int k = 0;
    const Projector p = projector_from_checkpoint(load_checkpoint(proj), &k);
    std::optional<LoraSet> lora;
    if (c.system == SystemKind::kConnectorLora) {
      lora = lora_from_checkpoint(load_checkpoint(
          in.lora.empty() ? (fs::path(proj).parent_path() / "lora.ckpt").string() : in.lora));
    }
    bundle = alignment_report(lm, p, k, lora ? &*lora : nullptr, item_frames(*item, fe), reference, opt);
  }
  ctx.open_output();
  write_alignment_bundle(ctx.path(item->id), bundle, lm.vocab());
  ctx.log() << bundle.tokens_text(lm.vocab());
  return kExitOk;
}

int cmd_report(Context& ctx, const Inputs& in) {
  const std::string src = in.in.empty() ? ctx.root() : in.in;
  ctx.open_output();
  const ReportOutput r = render_report(src, ctx.path(""));
  ctx.log() << r.text;
  return kExitOk;
}

int cmd_selftest(Context& ctx, const Inputs&) {
  validate(ctx.config());
  bool all = true;
  for (const auto& r : run_selftests(ctx.config().seed)) {
    ctx.log() << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    all = all && r.passed;
  }
  return all ? kExitOk : kExitRuntime;
}

std::string one_line(std::string s) {
  for (char& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

int fail(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  err << "slamkit: error: kind=" << kind << " message=" << one_line(message) << "\n";
  return code;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"slamkit: speech-to-LLM connector toolkit at desk scale", "slamkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "slamkit 0.1.0");

  using Handler = int (*)(Context&, const Inputs&);
  struct Sub {
    const char* name;
    const char* help;
    Handler handler;
  };
  const std::vector<Sub> subs = {
      {"synth", "Synthesize toy train/dev/test features and manifests from an LM", cmd_synth},
      {"pretrain-lm", "Pretrain and freeze the toy LM on the copy task", cmd_pretrain},
      {"train", "Train the projector (and LoRA adapters) against the frozen LM", cmd_train},
      {"train-ctc", "Train the CTC baseline head on encoder frames", cmd_train_ctc},
      {"perturb", "Write a tempo- or noise-perturbed copy of a manifest", cmd_perturb},
      {"eval", "Transcribe a manifest and score it", cmd_eval},
      {"sweep", "Evaluate a system across a tempo or noise grid", cmd_sweep},
      {"align", "Export the speech/text similarity map of one utterance", cmd_align},
      {"report", "Render the cross-domain matrix and sweep charts", cmd_report},
      {"selftest", "Run the oracle, gradient, SNR, TSM, and WER suites", cmd_selftest},
  };

  Common common;
  Inputs in;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, common);
    const std::string n = s.name;
    if (n == "synth" || n == "train" || n == "align" || n == "eval" || n == "sweep") {
      sub->add_option("--lm", in.lm, "Frozen LM checkpoint");
    }
    if (n == "train" || n == "train-ctc" || n == "eval" || n == "sweep" || n == "perturb" || n == "align") {
      sub->add_option("--data", in.data, "Directory with <split>.jsonl manifests");
    }
    if (n == "eval" || n == "sweep" || n == "perturb" || n == "align") {
      sub->add_option("--manifest", in.manifest, "Manifest to process (default: the test split)");
    }
    if (n == "eval" || n == "sweep" || n == "align") {
      sub->add_option("--projector", in.projector, "Projector checkpoint");
      sub->add_option("--lora", in.lora, "LoRA checkpoint (connector+lora)");
    }
    if (n == "eval" || n == "sweep") sub->add_option("--ctc", in.ctc, "CTC head checkpoint");
    if (n == "synth") {
      sub->add_option("--splits", in.splits, "Comma-separated splits to write");
      sub->add_flag("--audio", in.audio, "Also write tone WAVs and <split>.audio.jsonl");
    }
    if (n == "perturb" || n == "sweep") {
      sub->add_option("--kind", in.kind, "tempo or noise")->check(CLI::IsMember({"tempo", "noise"}));
      sub->add_option("--noise-class", in.noise_class, "babble, music, or synthetic")
          ->check(CLI::IsMember({"babble", "music", "synthetic"}));
    }
    if (n == "perturb") sub->add_option("--value", in.value, "Tempo ratio or SNR in dB");
    if (n == "align") {
      sub->add_option("--utterance", in.utterance, "Utterance id");
      sub->add_flag("--oracle", in.oracle, "Identity projector over the true token embeddings");
    }
    if (n == "report") sub->add_option("--in", in.in, "Results directory (default: the output root)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version surface as parse errors with exit code 0.
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    return fail(err, "usage", e.what(), kExitUsage);
  }

  const CLI::App* chosen = app.get_subcommands().front();
  Handler handler = nullptr;
  for (const auto& s : subs) {
    if (chosen->get_name() == s.name) handler = s.handler;
  }
  try {
    Context ctx(chosen->get_name(), common, out);
    return handler(ctx, in);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::kValidation:
      case ErrorKind::kFormat:
      case ErrorKind::kPrecondition:
      case ErrorKind::kUnsupported:
        return fail(err, to_string(e.kind()), e.what(), kExitValidation);
      default:
        return fail(err, to_string(e.kind()), e.what(), kExitRuntime);
    }
  } catch (const std::exception& e) {
    return fail(err, "runtime", e.what(), kExitRuntime);
  }
}

}  // namespace slamkit::cli
