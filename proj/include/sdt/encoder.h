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

#ifndef SDT_ENCODER_H_
#define SDT_ENCODER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdt/embeddings.h"
#include "sdt/lstm.h"
#include "sdt/rng.h"
#include "sdt/tape.h"

namespace sdt {

// Word-to-clause encoder: tokens are projected to p dims by tanh(D P), an
// LSTM over the projected tokens scores each one against s, and the
// softmax of those scores weights the original embeddings.
struct EncoderParams {
  Tensor projection;  // d x p
  LstmParams attention;  // p -> h
  Tensor score;       // 1 x h

  std::size_t input_dim() const { return projection.rows(); }
  std::size_t projected_dim() const { return projection.cols(); }
  std::size_t hidden() const { return score.cols(); }

  static EncoderParams Initialize(std::size_t d, std::size_t p, std::size_t h, Rng& rng);
  void CheckShapes() const;
};

struct EncoderVars {
  Var projection;
  LstmVars attention;
  Var score;
};

// Training-time dropout masks (inverted scaling). Masks are drawn in the
// order they are requested, so a fixed seed and call order reproduce them.
class Dropout {
 public:
  explicit Dropout(std::uint64_t seed) : rng_(seed) {}
  // Keep-mask scaled by 1/(1-rate); nullopt when rate is zero.
  std::optional<Tensor> Mask(const Shape& shape, double rate);

 private:
  Rng rng_;
};

struct EncoderDropout {
  Dropout* source = nullptr;  // nullptr in inference mode
  double embedding = 0.0;
  double attention = 0.0;
};

struct ClauseEncoding {
  Var summary;    // 1 x d
  Var attention;  // u x 1 over the active tokens
  std::vector<std::size_t> positions;  // token column of each attention row
};

// Encodes one clause; the clause must have at least one active token.
ClauseEncoding EncodeClause(const EncoderVars& vars, const EmbeddedParagraph& ep,
                            std::size_t clause, const EncoderDropout& dropout = {});

// Inference-mode helpers over plain tensors.

// tanh(D P) per token; c x w x p with masked positions left at zero.
Tensor Project(const EmbeddedParagraph& ep, const EncoderParams& params);
// Attention over one projected clause (w x p); zero at masked positions.
std::vector<double> Attend(const Tensor& projected_clause,
                           std::span<const std::uint8_t> mask,
                           const EncoderParams& params);
// D_summ[i] = A[i] . D[i]; rows of inactive clauses are zero.
Tensor Summarize(const EmbeddedParagraph& ep, const Tensor& attention);
// Full c x w attention matrix for a paragraph.
Tensor AttentionMatrix(const EmbeddedParagraph& ep, const EncoderParams& params);

struct AttentionRow {
  std::size_t clause;
  std::string token;
  double weight;
};

std::vector<AttentionRow> AttentionReport(const EmbeddedParagraph& ep,
                                          const EncoderParams& params);
std::string AttentionTsv(std::span<const AttentionRow> rows);
// Heat map: token background opacity follows its weight relative to the
// clause maximum.
std::string AttentionHtml(const std::string& title, std::span<const AttentionRow> rows,
                          std::span<const std::string> clause_labels = {});

}  // namespace sdt

#endif  // SDT_ENCODER_H_
