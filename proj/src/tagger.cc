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

#include "sdt/tagger.h"

#include <cstring>

#include "sdt/error.h"
#include "sdt/ops.h"
#include "sdt/parallel.h"

namespace sdt {

using json = nlohmann::json;

// ---------------------------------------------------------------- config

TaggerConfig TaggerConfig::ScaledDown(std::size_t d) {
  TaggerConfig c;
  c.d = d;
  c.p = 8;
  c.h = 8;
  c.d2 = 16;
  c.H = 16;
  c.lr = 1e-2;
  c.embedding_dropout = 0.2;
  c.dense_dropout = 0.2;
  c.attention_dropout = 0.2;
  c.lstm_dropout = 0.2;
  c.validation_ratio = 0.0;
  c.max_epochs = 200;
  c.patience = 200;
  return c;
}

void TaggerConfig::Validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ValidationError(std::string("config: ") + name + " must be positive");
  };
  positive(c, "c");
  positive(w, "w");
  positive(d, "d");
  positive(p, "p");
  positive(h, "h");
  positive(d2, "d_2");
  positive(H, "H");
  positive(batch_size, "batch_size");
  if (!(lr > 0.0)) throw ValidationError("config: lr must be positive");
  for (double rate : {embedding_dropout, dense_dropout, attention_dropout, lstm_dropout}) {
    if (!(rate >= 0.0 && rate < 1.0)) {
      throw ValidationError("config: dropout rates must lie in [0, 1)");
    }
  }
  if (max_epochs < 0) throw ValidationError("config: max_epochs must be >= 0");
  if (patience < 1) throw ValidationError("config: patience must be >= 1");
  if (!(validation_ratio >= 0.0 && validation_ratio < 1.0)) {
    throw ValidationError("config: validation_ratio must lie in [0, 1)");
  }
}

json TaggerConfig::ToJson() const {
  return json{{"c", c},
              {"w", w},
              {"d", d},
              {"p", p},
              {"h", h},
              {"d_2", d2},
              {"H", H},
              {"lr", lr},
              {"embedding_dropout", embedding_dropout},
              {"dense_dropout", dense_dropout},
              {"attention_dropout", attention_dropout},
              {"lstm_dropout", lstm_dropout},
              {"batch_size", batch_size},
              {"max_epochs", max_epochs},
              {"patience", patience},
              {"validation_ratio", validation_ratio},
              {"seed", seed}};
}

TaggerConfig TaggerConfig::FromJson(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  TaggerConfig cfg;
  static const char* kKnown[] = {"c", "w", "d", "p", "h", "d_2", "H", "lr",
                                 "embedding_dropout", "dense_dropout",
                                 "attention_dropout", "lstm_dropout", "batch_size",
                                 "max_epochs", "patience", "validation_ratio", "seed"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw ValidationError("config: unknown key '" + key + "'");
  }
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("c", cfg.c);
    get("w", cfg.w);
    get("d", cfg.d);
    get("p", cfg.p);
    get("h", cfg.h);
    get("d_2", cfg.d2);
    get("H", cfg.H);
    get("lr", cfg.lr);
    get("embedding_dropout", cfg.embedding_dropout);
    get("dense_dropout", cfg.dense_dropout);
    get("attention_dropout", cfg.attention_dropout);
    get("lstm_dropout", cfg.lstm_dropout);
    get("batch_size", cfg.batch_size);
    get("max_epochs", cfg.max_epochs);
    get("patience", cfg.patience);
    get("validation_ratio", cfg.validation_ratio);
    get("seed", cfg.seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  cfg.Validate();
  return cfg;
}

// ---------------------------------------------------------------- model

namespace {

void Uniform(Tensor& t, Rng& rng) {
  for (double& v : t.values()) v = rng.Uniform(-0.05, 0.05);
}

void InitializeHead(TaggerModel& m, Rng& rng) {
  const std::size_t k = m.label_set.BioSize();
  m.emission_weights = Tensor({2 * m.config.H, k});
  Uniform(m.emission_weights, rng);
  m.emission_bias = Tensor({1, k});
  m.transitions = Tensor({k, k});
  Uniform(m.transitions, rng);
  m.start = Tensor({1, k});
  m.end = Tensor({1, k});
}

LstmVars LeafLstm(Tape& tape, const LstmParams& p, std::size_t& slot) {
  LstmVars v;
  v.input_weights = tape.Leaf(p.input_weights, slot++);
  v.recurrent_weights = tape.Leaf(p.recurrent_weights, slot++);
  v.bias = tape.Leaf(p.bias, slot++);
  return v;
}

LstmVars RefLstm(Tape& tape, const LstmParams& p) {
  return LstmVars{tape.Reference(p.input_weights), tape.Reference(p.recurrent_weights),
                  tape.Reference(p.bias)};
}

void CheckLstm(const LstmParams& p, std::size_t in, std::size_t hidden, const char* name) {
  if (p.input_weights.shape() != Shape{in, 4 * hidden} ||
      p.recurrent_weights.shape() != Shape{hidden, 4 * hidden} ||
      p.bias.shape() != Shape{1, 4 * hidden}) {
    throw ValidationError(std::string("model: ") + name + " LSTM shapes are inconsistent");
  }
}

}  // namespace

TaggerModel TaggerModel::Initialize(const TaggerConfig& config, LabelSet label_set,
                                    std::uint64_t seed) {
  config.Validate();
  TaggerModel m;
  m.config = config;
  m.label_set = std::move(label_set);
  Rng rng(seed);
  m.encoder = EncoderParams::Initialize(config.d, config.p, config.h, rng);
  m.dense_weights = Tensor({config.d, config.d2});
  Uniform(m.dense_weights, rng);
  m.dense_bias = Tensor({1, config.d2});
  m.forward_lstm = LstmParams::Initialize(config.d2, config.H, rng);
  m.backward_lstm = LstmParams::Initialize(config.d2, config.H, rng);
  InitializeHead(m, rng);
  return m;
}

std::vector<std::pair<std::string, Tensor*>> TaggerModel::Parameters() {
  return {{"encoder.projection", &encoder.projection},
          {"encoder.attention.input_weights", &encoder.attention.input_weights},
          {"encoder.attention.recurrent_weights", &encoder.attention.recurrent_weights},
          {"encoder.attention.bias", &encoder.attention.bias},
          {"encoder.score", &encoder.score},
          {"dense.weights", &dense_weights},
          {"dense.bias", &dense_bias},
          {"bilstm.forward.input_weights", &forward_lstm.input_weights},
          {"bilstm.forward.recurrent_weights", &forward_lstm.recurrent_weights},
          {"bilstm.forward.bias", &forward_lstm.bias},
          {"bilstm.backward.input_weights", &backward_lstm.input_weights},
          {"bilstm.backward.recurrent_weights", &backward_lstm.recurrent_weights},
          {"bilstm.backward.bias", &backward_lstm.bias},
          {"emission.weights", &emission_weights},
          {"emission.bias", &emission_bias},
          {"crf.transitions", &transitions},
          {"crf.start", &start},
          {"crf.end", &end}};
}

std::vector<std::pair<std::string, const Tensor*>> TaggerModel::Parameters() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<TaggerModel*>(this)->Parameters()) {
    out.emplace_back(name, t);
  }
  return out;
}

std::size_t TaggerModel::ParameterCount() const {
  std::size_t n = 0;
  for (const auto& [name, t] : Parameters()) n += t->size();
  return n;
}

void TaggerModel::CheckShapes() const {
  const TaggerConfig& c = config;
  const std::size_t k = label_set.BioSize();
  if (encoder.projection.shape() != Shape{c.d, c.p} ||
      encoder.score.shape() != Shape{1, c.h}) {
    throw ValidationError("model: encoder shapes do not match the config");
  }
  CheckLstm(encoder.attention, c.p, c.h, "attention");
  if (dense_weights.shape() != Shape{c.d, c.d2} || dense_bias.shape() != Shape{1, c.d2}) {
    throw ValidationError("model: dense layer shapes do not match the config");
  }
  CheckLstm(forward_lstm, c.d2, c.H, "forward");
  CheckLstm(backward_lstm, c.d2, c.H, "backward");
  if (emission_weights.shape() != Shape{2 * c.H, k} ||
      emission_bias.shape() != Shape{1, k} || transitions.shape() != Shape{k, k} ||
      start.shape() != Shape{1, k} || end.shape() != Shape{1, k}) {
    throw ValidationError("model: emission/CRF shapes do not match " +
                          std::to_string(k) + " BIO tags");
  }
}

bool TaggerModel::operator==(const TaggerModel& other) const {
  if (!(config == other.config) || !(label_set == other.label_set)) return false;
  const auto a = Parameters();
  const auto b = other.Parameters();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(*a[i].second == *b[i].second)) return false;
  }
  return true;
}

ModelVars BindLeaves(Tape& tape, const TaggerModel& m) {
  std::size_t slot = 0;
  ModelVars v;
  v.encoder.projection = tape.Leaf(m.encoder.projection, slot++);
  v.encoder.attention = LeafLstm(tape, m.encoder.attention, slot);
  v.encoder.score = tape.Leaf(m.encoder.score, slot++);
  v.dense_weights = tape.Leaf(m.dense_weights, slot++);
  v.dense_bias = tape.Leaf(m.dense_bias, slot++);
  v.forward_lstm = LeafLstm(tape, m.forward_lstm, slot);
  v.backward_lstm = LeafLstm(tape, m.backward_lstm, slot);
  v.emission_weights = tape.Leaf(m.emission_weights, slot++);
  v.emission_bias = tape.Leaf(m.emission_bias, slot++);
  v.transitions = tape.Leaf(m.transitions, slot++);
  v.start = tape.Leaf(m.start, slot++);
  v.end = tape.Leaf(m.end, slot++);
  return v;
}

ModelVars BindReferences(Tape& tape, const TaggerModel& m) {
  ModelVars v;
  v.encoder.projection = tape.Reference(m.encoder.projection);
  v.encoder.attention = RefLstm(tape, m.encoder.attention);
  v.encoder.score = tape.Reference(m.encoder.score);
  v.dense_weights = tape.Reference(m.dense_weights);
  v.dense_bias = tape.Reference(m.dense_bias);
  v.forward_lstm = RefLstm(tape, m.forward_lstm);
  v.backward_lstm = RefLstm(tape, m.backward_lstm);
  v.emission_weights = tape.Reference(m.emission_weights);
  v.emission_bias = tape.Reference(m.emission_bias);
  v.transitions = tape.Reference(m.transitions);
  v.start = tape.Reference(m.start);
  v.end = tape.Reference(m.end);
  return v;
}

// ---------------------------------------------------------------- forward

Var EmissionsVar(const ModelVars& vars, const TaggerModel& model,
                 const EmbeddedParagraph& ep, Dropout* dropout) {
  Tape& tape = *vars.emission_weights.tape();
  const TaggerConfig& cfg = model.config;
  const std::size_t k = model.tag_count();
  if (ep.dim() != cfg.d) {
    throw ValidationError("embedding dim " + std::to_string(ep.dim()) +
                          " does not match model d=" + std::to_string(cfg.d));
  }
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < ep.clauses(); ++i) {
    if (ep.clause_mask[i]) active.push_back(i);
  }
  if (active.empty()) return tape.Constant(Tensor({ep.clauses(), k}));

  const EncoderDropout enc_dropout{dropout, cfg.embedding_dropout, cfg.attention_dropout};
  std::vector<Var> summaries;
  summaries.reserve(active.size());
  for (std::size_t i : active) {
    summaries.push_back(EncodeClause(vars.encoder, ep, i, enc_dropout).summary);
  }
  Var summary = ops::ConcatRows(summaries);
  Var dense = ops::Tanh(ops::Add(ops::MatMul(summary, vars.dense_weights), vars.dense_bias));
  std::optional<Tensor> fwd_mask, bwd_mask;
  if (dropout != nullptr) {
    if (auto mask = dropout->Mask(dense.value().shape(), cfg.dense_dropout)) {
      dense = ops::Mul(dense, tape.Constant(std::move(*mask)));
    }
    fwd_mask = dropout->Mask({1, cfg.H}, cfg.lstm_dropout);
    bwd_mask = dropout->Mask({1, cfg.H}, cfg.lstm_dropout);
  }
  const std::vector<Var> fwd = RunLstm(
      vars.forward_lstm, dense, cfg.H, {.reverse = false, .recurrent_mask = fwd_mask ? &*fwd_mask : nullptr});
  const std::vector<Var> bwd = RunLstm(
      vars.backward_lstm, dense, cfg.H, {.reverse = true, .recurrent_mask = bwd_mask ? &*bwd_mask : nullptr});
  std::vector<Var> rows;
  rows.reserve(active.size());
  for (std::size_t t = 0; t < active.size(); ++t) {
    const Var pair[] = {fwd[t], bwd[t]};
    rows.push_back(ops::ConcatCols(pair));
  }
  Var states = ops::ConcatRows(rows);
  Var emissions =
      ops::Add(ops::MatMul(states, vars.emission_weights), vars.emission_bias);
  if (active.size() == ep.clauses()) return emissions;

  std::vector<Var> full;
  std::size_t r = 0;
  for (std::size_t i = 0; i < ep.clauses(); ++i) {
    if (ep.clause_mask[i]) {
      full.push_back(ops::SliceRows(emissions, r, r + 1));
      ++r;
    } else {
      full.push_back(tape.Constant(Tensor({1, k})));
    }
  }
  return ops::ConcatRows(full);
}

Tensor Forward(const EmbeddedParagraph& ep, const TaggerModel& model, bool training,
               std::uint64_t dropout_seed) {
  model.CheckShapes();
  Tape tape;
  const ModelVars vars = BindReferences(tape, model);
  if (training) {
    Dropout dropout(dropout_seed);
    return EmissionsVar(vars, model, ep, &dropout).value();
  }
  return EmissionsVar(vars, model, ep, nullptr).value();
}

Var ParagraphLoss(const ModelVars& vars, const TaggerModel& model,
                  const EmbeddedParagraph& ep, std::span<const std::size_t> gold_tags,
                  Dropout* dropout) {
  std::size_t active = 0;
  for (std::uint8_t m : ep.clause_mask) active += m ? 1 : 0;
  if (active == 0) throw ValidationError("paragraph window has no tokens");
  Var emissions = EmissionsVar(vars, model, ep, dropout);
  Var nll = CrfNllNode(emissions, vars.transitions, vars.start, vars.end,
                       std::vector<std::size_t>(gold_tags.begin(), gold_tags.end()),
                       ep.clause_mask);
  return ops::Scale(nll, 1.0 / static_cast<double>(active));
}

std::vector<std::pair<std::size_t, std::size_t>> Windows(std::size_t n, std::size_t c) {
  if (c == 0) throw ValidationError("window size must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t b = 0; b < n; b += c) out.emplace_back(b, std::min(n, b + c));
  return out;
}

std::vector<std::size_t> TagIndices(const Paragraph& paragraph, const EmbeddingStore& store,
                                    const TaggerModel& model) {
  const EmbeddingRecord& record = RecordFor(store, paragraph);
  if (store.dim() != model.config.d) {
    throw ValidationError("embedding dim " + std::to_string(store.dim()) +
                          " does not match model d=" + std::to_string(model.config.d));
  }
  const std::size_t outside = model.tag_count() - 1;
  std::vector<std::size_t> tags;
  tags.reserve(paragraph.clauses.size());
  for (const auto& [b, e] : Windows(paragraph.clauses.size(), model.config.c)) {
    const EmbeddedParagraph ep = EmbedClauses(record, store.dim(), b, e, model.config.w);
    bool any = false;
    for (std::uint8_t m : ep.clause_mask) any = any || m;
    if (!any) {
      tags.insert(tags.end(), e - b, outside);
      continue;
    }
    const Tensor emissions = Forward(ep, model);
    const CrfWeights w{model.transitions, model.start, model.end};
    for (std::size_t t : Viterbi(emissions, w, ep.clause_mask)) {
      tags.push_back(t == kMaskedTag ? outside : t);
    }
  }
  return tags;
}

std::vector<std::string> Tag(const Paragraph& paragraph, const EmbeddingStore& store,
                             const TaggerModel& model) {
  const std::vector<std::size_t> tags = TagIndices(paragraph, store, model);
  return model.scheme().Decode(tags);
}

std::vector<std::vector<std::string>> TagCorpus(const Corpus& corpus,
                                                const EmbeddingStore& store,
                                                const TaggerModel& model) {
  for (const Paragraph& p : corpus.paragraphs) RecordFor(store, p);
  std::vector<std::vector<std::string>> out(corpus.paragraphs.size());
  ParallelFor(corpus.paragraphs.size(), [&](std::size_t i) {
    out[i] = Tag(corpus.paragraphs[i], store, model);
  });
  return out;
}

TaggerModel SwapHead(const TaggerModel& model, LabelSet new_label_set,
                     std::uint64_t seed) {
  TaggerModel out = model;
  out.label_set = std::move(new_label_set);
  Rng rng(Rng::Mix(seed ^ 0x5eed5eedULL));
  InitializeHead(out, rng);
  return out;
}

}  // namespace sdt
