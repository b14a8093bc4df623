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

#ifndef SDT_TAGGER_H_
#define SDT_TAGGER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sdt/corpus.h"
#include "sdt/crf.h"
#include "sdt/embeddings.h"
#include "sdt/encoder.h"
#include "sdt/lstm.h"

namespace sdt {

struct TaggerConfig {
  std::size_t c = 40;     // clauses per window
  std::size_t w = 60;     // tokens per clause
  std::size_t d = 768;    // embedding dim
  std::size_t p = 200;    // projection dim
  std::size_t h = 75;     // attention LSTM units
  std::size_t d2 = 300;   // dense layer on clause summaries
  std::size_t H = 350;    // per-direction clause BiLSTM units
  double lr = 1e-3;
  double embedding_dropout = 0.4;
  double dense_dropout = 0.4;
  double attention_dropout = 0.6;
  double lstm_dropout = 0.5;
  std::size_t batch_size = 10;
  int max_epochs = 20;
  int patience = 2;
  double validation_ratio = 0.1;
  std::uint64_t seed = 1;

  // Small dimensions for desk-scale fixtures: d as given, p=8, h=8, d2=16,
  // H=16, lr=1e-2, every dropout rate 0.2, no held-out slice (early
  // stopping watches the training loss), max_epochs=200, patience=200,
  // batch 10.
  static TaggerConfig ScaledDown(std::size_t d);

  void Validate() const;
  nlohmann::json ToJson() const;
  static TaggerConfig FromJson(const nlohmann::json& j);  // missing keys keep defaults
  bool operator==(const TaggerConfig&) const = default;
};

// All trainable parameters plus the label set they were trained for.
struct TaggerModel {
  TaggerConfig config;
  LabelSet label_set;
  EncoderParams encoder;
  Tensor dense_weights;  // d x d2
  Tensor dense_bias;     // 1 x d2
  LstmParams forward_lstm;   // d2 -> H
  LstmParams backward_lstm;  // d2 -> H
  Tensor emission_weights;   // 2H x K
  Tensor emission_bias;      // 1 x K
  Tensor transitions;        // K x K
  Tensor start;              // 1 x K
  Tensor end;                // 1 x K

  static TaggerModel Initialize(const TaggerConfig& config, LabelSet label_set,
                                std::uint64_t seed);

  std::size_t tag_count() const { return label_set.BioSize(); }
  BioScheme scheme() const { return BioScheme(label_set); }

  // Named parameters in a fixed order; gradients and optimizer state are
  // indexed the same way.
  std::vector<std::pair<std::string, Tensor*>> Parameters();
  std::vector<std::pair<std::string, const Tensor*>> Parameters() const;
  std::size_t ParameterCount() const;

  void CheckShapes() const;
  bool operator==(const TaggerModel& other) const;  // bitwise
};

struct ModelVars {
  EncoderVars encoder;
  Var dense_weights, dense_bias;
  LstmVars forward_lstm, backward_lstm;
  Var emission_weights, emission_bias;
  Var transitions, start, end;
};

// Leaves whose gradient slots follow TaggerModel::Parameters() order.
ModelVars BindLeaves(Tape& tape, const TaggerModel& model);
// Non-differentiable references for inference.
ModelVars BindReferences(Tape& tape, const TaggerModel& model);

// Per-clause emission scores (c x K). Inactive clauses are skipped by the
// clause BiLSTM and get all-zero rows. With `dropout`, every dropout site
// is active; without it the pass is deterministic.
Var EmissionsVar(const ModelVars& vars, const TaggerModel& model,
                 const EmbeddedParagraph& ep, Dropout* dropout = nullptr);

Tensor Forward(const EmbeddedParagraph& ep, const TaggerModel& model,
               bool training = false, std::uint64_t dropout_seed = 0);

// CRF negative log-likelihood divided by the number of active clauses.
Var ParagraphLoss(const ModelVars& vars, const TaggerModel& model,
                  const EmbeddedParagraph& ep, std::span<const std::size_t> gold_tags,
                  Dropout* dropout = nullptr);

// Clause windows [begin, end) of at most c clauses covering n clauses.
std::vector<std::pair<std::size_t, std::size_t>> Windows(std::size_t n, std::size_t c);

// Tags every clause: windows of c clauses, forward, viterbi, decode_bio.
// Clauses with no tokens receive the none label.
std::vector<std::string> Tag(const Paragraph& paragraph, const EmbeddingStore& store,
                             const TaggerModel& model);
std::vector<std::size_t> TagIndices(const Paragraph& paragraph,
                                    const EmbeddingStore& store,
                                    const TaggerModel& model);

// Tags every paragraph of a corpus (parallel over paragraphs).
std::vector<std::vector<std::string>> TagCorpus(const Corpus& corpus,
                                                const EmbeddingStore& store,
                                                const TaggerModel& model);

// Replaces the emission and CRF layers with fresh ones for a new label set.
TaggerModel SwapHead(const TaggerModel& model, LabelSet new_label_set,
                     std::uint64_t seed);

}  // namespace sdt

#endif  // SDT_TAGGER_H_
