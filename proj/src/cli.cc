// Copyright 2026 The sdtag Authors.
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

#include "sdt/cli.h"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdt/checkpoint.h"
#include "sdt/corpus.h"
#include "sdt/embeddings.h"
#include "sdt/encoder.h"
#include "sdt/error.h"
#include "sdt/featcrf.h"
#include "sdt/fragments.h"
#include "sdt/metrics.h"
#include "sdt/synth.h"
#include "sdt/tagger.h"
#include "sdt/train.h"
#include "sdt/transfer.h"

namespace sdt {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------- helpers

class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args)
      : start_(std::chrono::steady_clock::now()) {
    j_["command"] = std::move(command);
    j_["args"] = args;
    j_["tool_version"] = kToolVersion;
    j_["inputs"] = json::object();
    j_["outputs"] = json::array();
    j_["config"] = nullptr;
    j_["seed"] = nullptr;
  }

  void Input(const std::string& role, const std::string& path) {
    j_["inputs"][role] = {{"path", path}, {"fnv1a64", FileDigest(path)}};
  }
  void Output(const std::string& path) { j_["outputs"].push_back(path); }
  void Set(const std::string& key, json value) { j_[key] = std::move(value); }

  void Write(const std::string& path) {
    j_["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path);
    out << j_.dump(2) << '\n';
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

std::string ManifestPath(const std::string& explicit_path, const std::string& primary_output,
                         const std::string& command) {
  if (!explicit_path.empty()) return explicit_path;
  if (!primary_output.empty()) return primary_output + ".manifest.json";
  return "sdtag-" + command + ".manifest.json";
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void Emit(std::ostream& out, const std::string& path, const json& report, Manifest& manifest) {
  if (path.empty()) {
    out << report.dump(2) << '\n';
  } else {
    WriteText(path, report.dump(2) + "\n");
    manifest.Output(path);
  }
}

std::vector<std::vector<std::string>> GoldSequences(const Corpus& corpus) {
  std::vector<std::vector<std::string>> gold;
  for (const Paragraph& p : corpus.paragraphs) gold.push_back(p.GoldLabels());
  return gold;
}

void RequireSameLabels(const TaggerModel& model, const Corpus& corpus) {
  if (!(model.label_set == corpus.label_set)) {
    throw ValidationError("model label set '" + model.label_set.name() +
                          "' does not match corpus label set '" + corpus.label_set.name() + "'");
  }
}

std::string SafeName(const std::string& id) {
  std::string out;
  for (char c : id) {
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  }
  return out.empty() ? "paragraph" : out;
}

json ScoreJson(const FragmentScore& s) {
  return {{"f1", s.f1()},
          {"precision", s.precision()},
          {"recall", s.recall()},
          {"exact_match", s.exact_match()},
          {"true_positives", s.true_positives},
          {"false_positives", s.false_positives},
          {"false_negatives", s.false_negatives},
          {"clauses", s.clauses}};
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string task = "discourse";
  std::string corpus, embeddings, config, out, pretrained, preset = "full";
  std::optional<std::uint64_t> seed;
};

TaggerConfig LoadConfig(const std::string& preset, const std::string& path, std::size_t dim,
                        std::optional<std::uint64_t> seed) {
  TaggerConfig base = preset == "scaled-down" ? TaggerConfig::ScaledDown(dim) : TaggerConfig{};
  json merged = base.ToJson();
  if (!path.empty()) {
    const json file = ReadJsonFile(path);
    if (!file.is_object()) throw ValidationError(path + ": config must be a JSON object");
    merged.update(file);
  }
  if (seed) merged["seed"] = *seed;
  return TaggerConfig::FromJson(merged);
}

int CmdTrain(const TrainArgs& a, const std::string& manifest_path,
             const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("train", args);
  const Corpus corpus = ReadJsonl(a.corpus);
  const EmbeddingStore store = EmbeddingStore::Load(a.embeddings);
  manifest.Input("corpus", a.corpus);
  manifest.Input("embeddings", a.embeddings);
  if (!a.config.empty()) manifest.Input("config", a.config);
  if (a.task == "claim" && corpus.label_set.size() != 2) {
    throw ValidationError("claim task needs a two-label corpus, got '" +
                          corpus.label_set.name() + "'");
  }
  const TaggerConfig config = LoadConfig(a.preset, a.config, store.dim(), a.seed);
  if (config.d != store.dim()) {
    throw ValidationError("config d=" + std::to_string(config.d) +
                          " does not match embedding dim " + std::to_string(store.dim()));
  }
  manifest.Set("config", config.ToJson());
  manifest.Set("seed", config.seed);

  TrainResult result;
  if (!a.pretrained.empty()) {
    const TaggerModel pretrained = LoadModel(a.pretrained);
    manifest.Input("pretrained", a.pretrained);
    result = FineTune(pretrained, corpus, store, config);
  } else {
    result = Train(corpus, store, config);
  }
  SaveModel(result.model, a.out);
  manifest.Output(a.out);

  std::ostringstream log;
  log << "epoch\ttrain_loss\tvalidation_loss\timproved\n";
  char buf[64];
  for (const EpochLog& e : result.log) {
    log << e.epoch << '\t';
    std::snprintf(buf, sizeof(buf), "%.17g", e.train_loss);
    log << buf << '\t';
    if (e.validation_loss) {
      std::snprintf(buf, sizeof(buf), "%.17g", *e.validation_loss);
      log << buf;
    } else {
      log << "NA";
    }
    log << '\t' << (e.improved ? 1 : 0) << '\n';
  }
  const std::string log_path = a.out + ".log.tsv";
  WriteText(log_path, log.str());
  manifest.Output(log_path);
  manifest.Set("best_epoch", result.best_epoch);
  manifest.Set("stopped_epoch", result.stopped_epoch);
  manifest.Set("train_paragraphs", result.train_paragraphs);
  manifest.Set("validation_paragraphs", result.validation_paragraphs);
  manifest.Write(ManifestPath(manifest_path, a.out, "train"));
  out << "trained " << result.stopped_epoch << " epochs, best epoch " << result.best_epoch
      << ", checkpoint " << a.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string model, corpus, embeddings, compare, out, confusion;
  bool exclude_none = false;
  bool exact = false;
};

int CmdEval(const EvalArgs& a, const std::string& manifest_path,
            const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("eval", args);
  const TaggerModel model = LoadModel(a.model);
  const Corpus corpus = ReadJsonl(a.corpus);
  const EmbeddingStore store = EmbeddingStore::Load(a.embeddings);
  manifest.Input("model", a.model);
  manifest.Input("corpus", a.corpus);
  manifest.Input("embeddings", a.embeddings);
  RequireSameLabels(model, corpus);

  const auto gold_seqs = GoldSequences(corpus);
  const auto pred_seqs = TagCorpus(corpus, store, model);
  const std::vector<std::string> gold = Flatten(gold_seqs);
  const std::vector<std::string> pred = Flatten(pred_seqs);
  const LabelSet& labels = corpus.label_set;
  const bool claim = labels.size() == 2;

  json report;
  report["command"] = "eval";
  report["task"] = claim ? "claim" : "discourse";
  report["label_set"] = labels.name();
  report["paragraphs"] = corpus.paragraphs.size();
  report["clauses"] = gold.size();
  report["micro_f1"] = MicroF1(pred, gold);
  if (claim) {
    std::vector<int> p01, g01;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      p01.push_back(pred[i] != labels.none_label() ? 1 : 0);
      g01.push_back(gold[i] != labels.none_label() ? 1 : 0);
    }
    report["binary_f1"] = BinaryF1(p01, g01);
    report["positive_label"] = labels.labels()[labels.none_index() == 0 ? 1 : 0];
  }
  if (a.exclude_none) {
    report["micro_f1_excluding_none"] = MicroF1ExcludingNone(pred, gold, labels.none_label());
  }
  const ConfusionMatrix cm = Confusion(pred, gold, labels);
  report["confusion"] = {{"labels", cm.labels}, {"counts", cm.counts}};
  report["kappa_vs_gold"] = CohenKappa(pred, gold);
  if (!a.compare.empty()) {
    const TaggerModel other = LoadModel(a.compare);
    manifest.Input("compare", a.compare);
    RequireSameLabels(other, corpus);
    const std::vector<std::string> pred_b = Flatten(TagCorpus(corpus, store, other));
    const McNemarResult m = McNemar(pred, pred_b, gold, a.exact);
    report["compare"] = {{"model", a.compare}, {"micro_f1", MicroF1(pred_b, gold)}};
    report["mcnemar"] = {{"a_only", m.a_only},
                         {"b_only", m.b_only},
                         {"statistic", m.statistic},
                         {"p_value", m.p_value},
                         {"exact", m.exact}};
  }
  if (!a.confusion.empty()) {
    WriteText(a.confusion, cm.ToTsv());
    manifest.Output(a.confusion);
  }
  Emit(out, a.out, report, manifest);
  manifest.Write(ManifestPath(manifest_path, a.out, "eval"));
  return 0;
}

// ---------------------------------------------------------------- fragments

struct FragmentArgs {
  std::string corpus, model, out, discourse_model, embeddings, validation;
  bool gold_tags = false;
  bool no_tags = false;
  bool gold_bio = false;
  std::optional<double> l2;
};

// Discourse tags per paragraph, or empty when tags are disabled.
std::vector<std::vector<std::string>> TagSource(const FragmentArgs& a, const Corpus& corpus,
                                                Manifest& manifest) {
  if (a.no_tags) return {};
  if (a.gold_tags) return GoldSequences(corpus);
  if (!a.discourse_model.empty()) {
    if (a.embeddings.empty()) throw ValidationError("--discourse-model needs --embeddings");
    const TaggerModel model = LoadModel(a.discourse_model);
    const EmbeddingStore store = EmbeddingStore::Load(a.embeddings);
    manifest.Input("discourse_model", a.discourse_model);
    manifest.Input("embeddings", a.embeddings);
    return TagCorpus(corpus, store, model);
  }
  throw ValidationError("choose a tag source: --discourse-model, --gold-tags or --no-tags");
}

int CmdFragments(const std::string& mode, const FragmentArgs& a, const std::string& manifest_path,
                 const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("fragments " + mode, args);
  const Corpus corpus = ReadJsonl(a.corpus);
  manifest.Input("corpus", a.corpus);
  json tag_mode = a.no_tags ? "none" : a.gold_tags ? "gold" : "model";

  if (mode == "train") {
    const auto tags = TagSource(a, corpus, manifest);
    const std::vector<FeatSequence> data = FragmentSequences(corpus, tags);
    double l2 = a.l2.value_or(1.0);
    json selection = json::array();
    if (!a.validation.empty()) {
      if (a.l2) throw ValidationError("--l2 and --validation are exclusive");
      const Corpus validation = ReadJsonl(a.validation);
      manifest.Input("validation", a.validation);
      const auto val_tags = TagSource(a, validation, manifest);
      double best = -1.0;
      for (double candidate : {0.01, 0.1, 1.0, 10.0}) {
        const FeatCrfModel m = TrainFeatCrf(data, candidate).model;
        const double f1 = EvaluateFragments(validation, val_tags, m).f1();
        selection.push_back({{"l2", candidate}, {"validation_f1", f1}});
        if (f1 > best) {
          best = f1;
          l2 = candidate;
        }
      }
    }
    const FeatCrfTraining trained = TrainFeatCrf(data, l2);
    trained.model.Save(a.out);
    manifest.Output(a.out);
    manifest.Set("config", {{"l2", l2}, {"tags", tag_mode}, {"l2_selection", selection}});
    manifest.Set("optimizer", {{"iterations", trained.optimizer.iterations},
                               {"converged", trained.optimizer.converged},
                               {"objective", trained.optimizer.value},
                               {"gradient_norm", trained.optimizer.gradient_norm}});
    manifest.Write(ManifestPath(manifest_path, a.out, "fragments-train"));
    out << "featcrf trained: l2=" << l2 << ", " << trained.model.features.size()
        << " features, " << trained.optimizer.iterations << " iterations\n";
    return 0;
  }

  if (mode == "eval" && a.gold_bio) {
    const FragmentScore score = GoldBlockFragments(corpus);
    json report = ScoreJson(score);
    report["mode"] = "gold-bio";
    Emit(out, a.out, report, manifest);
    manifest.Write(ManifestPath(manifest_path, a.out, "fragments-eval"));
    return 0;
  }

  if (a.model.empty()) throw ValidationError("--model is required");
  const FeatCrfModel model = FeatCrfModel::Load(a.model);
  manifest.Input("model", a.model);
  const auto tags = TagSource(a, corpus, manifest);
  manifest.Set("config", {{"tags", tag_mode}});

  if (mode == "eval") {
    json report = ScoreJson(EvaluateFragments(corpus, tags, model));
    report["mode"] = "predicted";
    report["tags"] = tag_mode;
    Emit(out, a.out, report, manifest);
    manifest.Write(ManifestPath(manifest_path, a.out, "fragments-eval"));
    return 0;
  }

  // predict
  if (a.out.empty()) throw ValidationError("--out is required for predict");
  Corpus predicted = corpus;
  for (std::size_t i = 0; i < predicted.paragraphs.size(); ++i) {
    Paragraph& p = predicted.paragraphs[i];
    const std::vector<std::string>* t = tags.empty() ? nullptr : &tags[i];
    const std::vector<CodeSet> mentions = ClauseMentions(p);
    p.fragment = FragmentAnnotation{PredictFragments(p, t, model), mentions};
  }
  WriteJsonl(predicted, a.out);
  manifest.Output(a.out);
  manifest.Write(ManifestPath(manifest_path, a.out, "fragments-predict"));
  out << "wrote fragment predictions for " << predicted.paragraphs.size() << " paragraphs to "
      << a.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- zeroshot

struct ZeroShotArgs {
  std::string model, target_train, target_test, embeddings, out;
};

int CmdZeroShot(const ZeroShotArgs& a, const std::string& manifest_path,
                const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("zeroshot", args);
  const TaggerModel model = LoadModel(a.model);
  const Corpus train = ReadJsonl(a.target_train);
  const Corpus test = ReadJsonl(a.target_test);
  const EmbeddingStore store = EmbeddingStore::Load(a.embeddings);
  manifest.Input("model", a.model);
  manifest.Input("target_train", a.target_train);
  manifest.Input("target_test", a.target_test);
  manifest.Input("embeddings", a.embeddings);
  if (!(train.label_set == test.label_set)) {
    throw ValidationError("target train and test corpora use different label sets");
  }
  const LabelMap map = LearnLabelMap(model, train, store);
  const ZeroShotResult result = ZeroShotEval(model, map, test, store);
  json report = {{"command", "zeroshot"},
                 {"micro_f1", result.micro_f1},
                 {"label_map", map.ToJson()},
                 {"degenerate", map.degenerate}};
  if (a.out.empty()) {
    out << report.dump(2) << '\n';
  } else {
    fs::create_directories(a.out);
    const std::string map_path = (fs::path(a.out) / "label_map.json").string();
    const std::string score_path = (fs::path(a.out) / "zeroshot.json").string();
    WriteText(map_path, map.ToJson().dump(2) + "\n");
    WriteText(score_path, report.dump(2) + "\n");
    manifest.Output(map_path);
    manifest.Output(score_path);
    out << "zero-shot micro F1 " << result.micro_f1 << '\n';
    for (const std::string& d : map.degenerate) {
      out << "degenerate: source label '" << d << "' never predicted\n";
    }
  }
  manifest.Write(ManifestPath(manifest_path,
                              a.out.empty() ? "" : (fs::path(a.out) / "zeroshot").string(),
                              "zeroshot"));
  return 0;
}

// ---------------------------------------------------------------- attention

struct AttentionArgs {
  std::string model, corpus, embeddings, out;
};

int CmdAttention(const AttentionArgs& a, const std::string& manifest_path,
                 const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("attention", args);
  const TaggerModel model = LoadModel(a.model);
  const Corpus corpus = ReadJsonl(a.corpus);
  const EmbeddingStore store = EmbeddingStore::Load(a.embeddings);
  manifest.Input("model", a.model);
  manifest.Input("corpus", a.corpus);
  manifest.Input("embeddings", a.embeddings);
  if (store.dim() != model.config.d) {
    throw ValidationError("embedding dim does not match the model");
  }
  fs::create_directories(a.out);
  const auto predicted = TagCorpus(corpus, store, model);
  std::size_t written = 0;
  for (std::size_t i = 0; i < corpus.paragraphs.size(); ++i) {
    const Paragraph& p = corpus.paragraphs[i];
    const EmbeddingRecord& record = RecordFor(store, p);
    std::vector<AttentionRow> rows;
    for (const auto& [b, e] : Windows(p.clauses.size(), model.config.c)) {
      const EmbeddedParagraph ep = EmbedClauses(record, store.dim(), b, e, model.config.w);
      for (AttentionRow r : AttentionReport(ep, model.encoder)) {
        r.clause += b;
        rows.push_back(std::move(r));
      }
    }
    const std::string stem = (fs::path(a.out) / SafeName(p.id)).string();
    WriteText(stem + ".tsv", AttentionTsv(rows));
    WriteText(stem + ".html", AttentionHtml(p.id, rows, predicted[i]));
    manifest.Output(stem + ".tsv");
    manifest.Output(stem + ".html");
    ++written;
  }
  manifest.Write(ManifestPath(manifest_path, (fs::path(a.out) / "attention").string(),
                              "attention"));
  out << "wrote attention reports for " << written << " paragraphs to " << a.out << '\n';
  return 0;
}

// ---------------------------------------------------------------- data tools

struct ImportArgs {
  std::string format, in, out, split = "unsplit";
};

int CmdImport(const ImportArgs& a, const std::string& manifest_path,
              const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("import", args);
  Corpus corpus = a.format == "rct" ? ParseRct(a.in)
                  : a.format == "scidt" ? ParseScidt(a.in)
                                        : ParseCoda(a.in);
  manifest.Input("source", a.in);
  corpus.split = ParseSplit(a.split);
  WriteJsonl(corpus, a.out);
  manifest.Output(a.out);
  manifest.Write(ManifestPath(manifest_path, a.out, "import"));
  out << "imported " << corpus.paragraphs.size() << " paragraphs, " << corpus.ClauseCount()
      << " clauses\n";
  return 0;
}

struct SplitArgs {
  std::string corpus, out_a, out_b;
  double ratio = 0.1;
  std::uint64_t seed = 1;
};

int CmdSplit(const SplitArgs& a, const std::string& manifest_path,
             const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("split", args);
  const Corpus corpus = ReadJsonl(a.corpus);
  manifest.Input("corpus", a.corpus);
  manifest.Set("seed", a.seed);
  manifest.Set("config", {{"ratio", a.ratio}});
  auto [first, second] = SplitCorpus(corpus, a.ratio, a.seed);
  WriteJsonl(first, a.out_a);
  WriteJsonl(second, a.out_b);
  manifest.Output(a.out_a);
  manifest.Output(a.out_b);
  manifest.Write(ManifestPath(manifest_path, a.out_a, "split"));
  out << first.paragraphs.size() << " / " << second.paragraphs.size() << " paragraphs\n";
  return 0;
}

struct EmbedArgs {
  std::vector<std::string> corpora;
  std::string out;
  std::size_t dim = 64;
  std::uint64_t seed = 1;
};

int CmdEmbedSynthetic(const EmbedArgs& a, const std::string& manifest_path,
                      const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("embed-synthetic", args);
  if (a.dim == 0) throw ValidationError("--dim must be positive");
  std::optional<EmbeddingStore> store;
  for (std::size_t i = 0; i < a.corpora.size(); ++i) {
    const Corpus corpus = ReadJsonl(a.corpora[i]);
    manifest.Input("corpus" + std::to_string(i), a.corpora[i]);
    EmbeddingStore part = HashedEmbeddings(corpus, a.dim, a.seed);
    if (!store) {
      store = std::move(part);
    } else {
      for (const std::string& id : part.ids()) store->Add(part.Get(id));
    }
  }
  manifest.Set("seed", a.seed);
  manifest.Set("config", {{"dim", a.dim}});
  store->Save(a.out);
  manifest.Output(a.out);
  manifest.Write(ManifestPath(manifest_path, a.out, "embed-synthetic"));
  out << "wrote " << store->size() << " records (dim " << a.dim << ") to " << a.out << '\n';
  return 0;
}

struct SynthArgs {
  std::string kind, out, label_set = "scidt", id_prefix;
  std::size_t paragraphs = 20;
  std::uint64_t seed = 1;
  double violation_rate = 0.0;
  double tag_noise = 0.0;
};

int CmdSynth(const SynthArgs& a, const std::string& manifest_path,
             const std::vector<std::string>& args, std::ostream& out) {
  Manifest manifest("synth", args);
  Corpus corpus;
  json info = {{"kind", a.kind}, {"paragraphs", a.paragraphs}};
  if (a.kind == "keyword") {
    KeywordCorpusOptions o;
    o.paragraphs = a.paragraphs;
    if (!a.id_prefix.empty()) o.id_prefix = a.id_prefix;
    corpus = KeywordCorpus(*BuiltinLabels(a.label_set), o, a.seed);
    info["label_set"] = a.label_set;
  } else {
    BlockCorpusOptions o;
    o.paragraphs = a.paragraphs;
    o.violation_rate = a.violation_rate;
    o.tag_noise = a.tag_noise;
    if (!a.id_prefix.empty()) o.id_prefix = a.id_prefix;
    const BlockCorpus blocks = GenerateBlockCorpus(o, a.seed);
    corpus = blocks.corpus;
    info["violation_rate"] = a.violation_rate;
    info["tag_noise"] = a.tag_noise;
    info["blocks"] = blocks.blocks;
    info["violating_blocks"] = blocks.violating_blocks;
    info["expected_gold_bio_f1"] = blocks.expected_f1();
  }
  WriteJsonl(corpus, a.out);
  manifest.Output(a.out);
  manifest.Set("seed", a.seed);
  manifest.Set("config", info);
  manifest.Write(ManifestPath(manifest_path, a.out, "synth"));
  out << "wrote " << corpus.paragraphs.size() << " paragraphs to " << a.out << '\n';
  return 0;
}

int Dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sdtag: scientific discourse tagging, claim extraction and evidence fragments",
               "sdtag"};
  app.require_subcommand(1);
  std::string manifest;
  app.add_option("--manifest", manifest, "Run manifest path (default: next to the output)");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train a discourse or claim tagger");
  train->add_option("--task", ta.task)->check(CLI::IsMember({"discourse", "claim"}));
  train->add_option("--corpus", ta.corpus, "Canonical JSONL corpus")->required();
  train->add_option("--embeddings", ta.embeddings, "SDTE embedding file")->required();
  train->add_option("--config", ta.config, "JSON config overriding the preset");
  train->add_option("--preset", ta.preset)->check(CLI::IsMember({"full", "scaled-down"}));
  train->add_option("--seed", ta.seed);
  train->add_option("--out", ta.out, "Checkpoint path")->required();
  train->add_option("--pretrained", ta.pretrained, "Fine-tune from this checkpoint");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a tagger");
  eval->add_option("--model", ea.model)->required();
  eval->add_option("--corpus", ea.corpus)->required();
  eval->add_option("--embeddings", ea.embeddings)->required();
  eval->add_flag("--exclude-none", ea.exclude_none, "Also report F1 without the none class");
  eval->add_option("--compare", ea.compare, "Second model for McNemar's test");
  eval->add_flag("--exact", ea.exact, "Exact binomial McNemar below 25 discordant pairs");
  eval->add_option("--out", ea.out, "Report JSON (default: stdout)");
  eval->add_option("--confusion", ea.confusion, "Confusion matrix TSV");

  FragmentArgs fa;
  auto* frag = app.add_subcommand("fragments", "Evidence fragment detection");
  frag->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--corpus", fa.corpus)->required();
    sub->add_option("--discourse-model", fa.discourse_model);
    sub->add_option("--embeddings", fa.embeddings);
    sub->add_flag("--gold-tags", fa.gold_tags);
    sub->add_flag("--no-tags", fa.no_tags);
  };
  auto* frag_train = frag->add_subcommand("train", "Train the feature CRF");
  add_common(frag_train);
  frag_train->add_option("--out", fa.out)->required();
  frag_train->add_option("--l2", fa.l2);
  frag_train->add_option("--validation", fa.validation, "Select l2 by validation F1");
  auto* frag_predict = frag->add_subcommand("predict", "Predict per-clause subfigure codes");
  add_common(frag_predict);
  frag_predict->add_option("--model", fa.model)->required();
  frag_predict->add_option("--out", fa.out)->required();
  auto* frag_eval = frag->add_subcommand("eval", "Score fragment predictions");
  add_common(frag_eval);
  frag_eval->add_option("--model", fa.model);
  frag_eval->add_flag("--gold-bio", fa.gold_bio, "Decode from gold block tags");
  frag_eval->add_option("--out", fa.out);

  ZeroShotArgs za;
  auto* zs = app.add_subcommand("zeroshot", "Majority-vote label mapping and evaluation");
  zs->add_option("--model", za.model)->required();
  zs->add_option("--target-train", za.target_train)->required();
  zs->add_option("--target-test", za.target_test)->required();
  zs->add_option("--embeddings", za.embeddings)->required();
  zs->add_option("--out", za.out, "Output directory");

  AttentionArgs aa;
  auto* att = app.add_subcommand("attention", "Token attention reports");
  att->add_option("--model", aa.model)->required();
  att->add_option("--corpus", aa.corpus)->required();
  att->add_option("--embeddings", aa.embeddings)->required();
  att->add_option("--out", aa.out)->required();

  ImportArgs ia;
  auto* imp = app.add_subcommand("import", "Convert a dataset to canonical JSONL");
  imp->add_option("--format", ia.format)->required()->check(CLI::IsMember({"rct", "scidt", "coda"}));
  imp->add_option("--in", ia.in)->required();
  imp->add_option("--out", ia.out)->required();
  imp->add_option("--split", ia.split)->check(CLI::IsMember({"train", "dev", "test", "unsplit"}));

  SplitArgs sa;
  auto* split = app.add_subcommand("split", "Seeded train/held-out split");
  split->add_option("--corpus", sa.corpus)->required();
  split->add_option("--ratio", sa.ratio);
  split->add_option("--seed", sa.seed);
  split->add_option("--out-a", sa.out_a)->required();
  split->add_option("--out-b", sa.out_b)->required();

  EmbedArgs ma;
  auto* embed = app.add_subcommand("embed-synthetic", "Hashed token embeddings for fixtures");
  embed->add_option("--corpus", ma.corpora)->required();
  embed->add_option("--dim", ma.dim);
  embed->add_option("--seed", ma.seed);
  embed->add_option("--out", ma.out)->required();

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--kind", ya.kind)->required()->check(CLI::IsMember({"keyword", "blocks"}));
  synth->add_option("--label-set", ya.label_set)
      ->check(CLI::IsMember({"scidt", "rct", "coda", "claim"}));
  synth->add_option("--paragraphs", ya.paragraphs);
  synth->add_option("--seed", ya.seed);
  synth->add_option("--violation-rate", ya.violation_rate);
  synth->add_option("--tag-noise", ya.tag_noise);
  synth->add_option("--id-prefix", ya.id_prefix, "Paragraph id prefix");
  synth->add_option("--out", ya.out)->required();

  std::vector<std::string> argv_store{"sdtag"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "sdtag: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kValidation);
  }

  if (*train) return CmdTrain(ta, manifest, args, out);
  if (*eval) return CmdEval(ea, manifest, args, out);
  if (*frag) {
    const std::string mode = *frag_train ? "train" : *frag_predict ? "predict" : "eval";
    return CmdFragments(mode, fa, manifest, args, out);
  }
  if (*zs) return CmdZeroShot(za, manifest, args, out);
  if (*att) return CmdAttention(aa, manifest, args, out);
  if (*imp) return CmdImport(ia, manifest, args, out);
  if (*split) return CmdSplit(sa, manifest, args, out);
  if (*embed) return CmdEmbedSynthetic(ma, manifest, args, out);
  if (*synth) return CmdSynth(ya, manifest, args, out);
  throw InternalError("no subcommand dispatched");
}

}  // namespace

std::string FileDigest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return Dispatch(args, out, err);
  } catch (const Error& e) {
    err << "sdtag: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "sdtag: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kValidation);
  } catch (const fs::filesystem_error& e) {
    err << "sdtag: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kIo);
  } catch (const std::exception& e) {
    err << "sdtag: internal error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::kInternal);
  }
}

}  // namespace sdt
