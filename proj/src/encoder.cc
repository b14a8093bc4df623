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

#include "sdt/encoder.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "sdt/error.h"
#include "sdt/ops.h"

namespace sdt {

EncoderParams EncoderParams::Initialize(std::size_t d, std::size_t p, std::size_t h,
                                        Rng& rng) {
  EncoderParams e;
  e.projection = Tensor({d, p});
  for (double& v : e.projection.values()) v = rng.Uniform(-0.05, 0.05);
  e.attention = LstmParams::Initialize(p, h, rng);
  e.score = Tensor({1, h});
  for (double& v : e.score.values()) v = rng.Uniform(-0.05, 0.05);
  return e;
}

void EncoderParams::CheckShapes() const {
  const std::size_t p = projection.cols();
  const std::size_t h = score.cols();
  if (projection.rank() != 2 || score.shape() != Shape{1, h} ||
      attention.input_weights.shape() != Shape{p, 4 * h} ||
      attention.recurrent_weights.shape() != Shape{h, 4 * h} ||
      attention.bias.shape() != Shape{1, 4 * h}) {
    throw ValidationError("encoder parameter shapes are inconsistent");
  }
}

std::optional<Tensor> Dropout::Mask(const Shape& shape, double rate) {
  if (rate <= 0.0) return std::nullopt;
  Tensor mask(shape);
  const double keep = 1.0 - rate;
  for (double& v : mask.values()) v = rng_.Uniform() < keep ? 1.0 / keep : 0.0;
  return mask;
}

ClauseEncoding EncodeClause(const EncoderVars& vars, const EmbeddedParagraph& ep,
                            std::size_t clause, const EncoderDropout& dropout) {
  Tape& tape = *vars.projection.tape();
  const std::size_t d = ep.dim();
  if (vars.projection.value().rows() != d) {
    throw ValidationError("embedding dim " + std::to_string(d) +
                          " does not match projection " +
                          ShapeString(vars.projection.value().shape()));
  }
  ClauseEncoding enc;
  enc.positions = ep.ActiveTokens(clause);
  const std::size_t u = enc.positions.size();
  if (u == 0) {
    throw ValidationError("clause " + std::to_string(clause) + " has no active tokens");
  }
  Tensor rows({u, d});
  for (std::size_t r = 0; r < u; ++r) {
    for (std::size_t k = 0; k < d; ++k) rows(r, k) = ep.embeddings.at(clause, enc.positions[r], k);
  }
  if (dropout.source != nullptr) {
    if (auto mask = dropout.source->Mask(rows.shape(), dropout.embedding)) {
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] *= (*mask)[i];
    }
  }
  Var tokens = tape.Constant(std::move(rows));
  Var projected = ops::Tanh(ops::MatMul(tokens, vars.projection));
  const std::size_t h = vars.score.value().cols();
  std::vector<Var> states = RunLstm(vars.attention, projected, h);
  Var hidden = ops::ConcatRows(states);                                  // u x h
  Var scores = ops::MatMul(hidden, vars.score, {.trans_b = true});       // u x 1
  enc.attention = ops::Softmax(scores);
  Var weights = enc.attention;
  if (dropout.source != nullptr) {
    if (auto mask = dropout.source->Mask({u, 1}, dropout.attention)) {
      weights = ops::Mul(weights, tape.Constant(std::move(*mask)));
    }
  }
  enc.summary = ops::MatMul(weights, tokens, {.trans_a = true});       // 1 x d
  return enc;
}

namespace {

EncoderVars ReferenceVars(Tape& tape, const EncoderParams& params) {
  return EncoderVars{tape.Reference(params.projection),
                     LstmVars{tape.Reference(params.attention.input_weights),
                              tape.Reference(params.attention.recurrent_weights),
                              tape.Reference(params.attention.bias)},
                     tape.Reference(params.score)};
}

}  // namespace

Tensor Project(const EmbeddedParagraph& ep, const EncoderParams& params) {
  if (ep.dim() != params.input_dim()) {
    throw ValidationError("embedding dim " + std::to_string(ep.dim()) +
                          " does not match projection rows " +
                          std::to_string(params.input_dim()));
  }
  const std::size_t c = ep.clauses(), w = ep.width(), d = ep.dim();
  const std::size_t p = params.projected_dim();
  Tensor flat({c * w, d}, std::vector<double>(ep.embeddings.values().begin(),
                                              ep.embeddings.values().end()));
  Tensor product = kernels::MatMul(flat, params.projection);
  Tensor out({c, w, p});
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      if (!ep.token_active(i, j)) continue;
      for (std::size_t k = 0; k < p; ++k) out.at(i, j, k) = std::tanh(product(i * w + j, k));
    }
  }
  return out;
}

std::vector<double> Attend(const Tensor& projected_clause,
                           std::span<const std::uint8_t> mask,
                           const EncoderParams& params) {
  const std::size_t w = projected_clause.rows();
  const std::size_t p = projected_clause.cols();
  if (mask.size() != w || p != params.projected_dim()) {
    throw ValidationError("attend: shape mismatch");
  }
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < w; ++j) {
    if (mask[j]) active.push_back(j);
  }
  if (active.empty()) throw ValidationError("attend: clause has no active tokens");
  Tensor rows({active.size(), p});
  for (std::size_t r = 0; r < active.size(); ++r) {
    for (std::size_t k = 0; k < p; ++k) rows(r, k) = projected_clause(active[r], k);
  }
  Tape tape;
  const EncoderVars vars = ReferenceVars(tape, params);
  std::vector<Var> states = RunLstm(vars.attention, tape.Constant(std::move(rows)),
                                    params.hidden());
  Var scores = ops::MatMul(ops::ConcatRows(states), vars.score, {.trans_b = true});
  const Tensor& a = ops::Softmax(scores).value();
  std::vector<double> out(w, 0.0);
  for (std::size_t r = 0; r < active.size(); ++r) out[active[r]] = a[r];
  return out;
}

Tensor Summarize(const EmbeddedParagraph& ep, const Tensor& attention) {
  const std::size_t c = ep.clauses(), w = ep.width(), d = ep.dim();
  if (attention.shape() != Shape{c, w}) {
    throw ValidationError("summarize: attention " + ShapeString(attention.shape()) +
                          " does not match " + std::to_string(c) + "x" + std::to_string(w));
  }
  Tensor out({c, d});
  for (std::size_t i = 0; i < c; ++i) {
    if (!ep.clause_mask[i]) continue;
    for (std::size_t j = 0; j < w; ++j) {
      const double a = attention(i, j);
      if (a == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) out(i, k) += a * ep.embeddings.at(i, j, k);
    }
  }
  return out;
}

Tensor AttentionMatrix(const EmbeddedParagraph& ep, const EncoderParams& params) {
  params.CheckShapes();
  const Tensor projected = Project(ep, params);
  const std::size_t c = ep.clauses(), w = ep.width(), p = params.projected_dim();
  Tensor out({c, w});
  for (std::size_t i = 0; i < c; ++i) {
    if (!ep.clause_mask[i]) continue;
    Tensor clause({w, p});
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t k = 0; k < p; ++k) clause(j, k) = projected.at(i, j, k);
    }
    const std::vector<double> a = Attend(
        clause, std::span<const std::uint8_t>(ep.token_mask).subspan(i * w, w), params);
    for (std::size_t j = 0; j < w; ++j) out(i, j) = a[j];
  }
  return out;
}

std::vector<AttentionRow> AttentionReport(const EmbeddedParagraph& ep,
                                          const EncoderParams& params) {
  const Tensor a = AttentionMatrix(ep, params);
  std::vector<AttentionRow> rows;
  for (std::size_t i = 0; i < ep.clauses(); ++i) {
    std::size_t t = 0;
    for (std::size_t j = 0; j < ep.width(); ++j) {
      if (!ep.token_active(i, j)) continue;
      rows.push_back(AttentionRow{i, ep.tokens[i][t++], a(i, j)});
    }
  }
  return rows;
}

std::string AttentionTsv(std::span<const AttentionRow> rows) {
  std::ostringstream out;
  out << "clause_index\ttoken\tweight\n";
  char buf[32];
  for (const AttentionRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.weight);
    out << r.clause << '\t' << r.token << '\t' << buf << '\n';
  }
  return out.str();
}

namespace {

std::string HtmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string AttentionHtml(const std::string& title, std::span<const AttentionRow> rows,
                          std::span<const std::string> clause_labels) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>"
      << HtmlEscape(title) << "</title>\n<style>\n"
      << "body{font-family:sans-serif;max-width:60em;margin:2em auto}\n"
      << ".clause{margin:.6em 0;line-height:1.8}\n"
      << ".label{font-weight:bold;margin-right:.5em}\n"
      << ".tok{padding:.1em .15em;border-radius:.2em}\n"
      << "</style></head><body>\n<h1>" << HtmlEscape(title) << "</h1>\n";
  std::size_t i = 0;
  while (i < rows.size()) {
    const std::size_t clause = rows[i].clause;
    std::size_t end = i;
    double max_w = 0.0;
    while (end < rows.size() && rows[end].clause == clause) {
      max_w = std::max(max_w, rows[end].weight);
      ++end;
    }
    out << "<div class=\"clause\">";
    if (clause < clause_labels.size()) {
      out << "<span class=\"label\">" << HtmlEscape(clause_labels[clause]) << "</span>";
    }
    for (std::size_t k = i; k < end; ++k) {
      const double alpha = max_w > 0 ? rows[k].weight / max_w : 0.0;
      char style[96];
      std::snprintf(style, sizeof(style), "background:rgba(220,40,40,%.3f)", alpha);
      char weight[32];
      std::snprintf(weight, sizeof(weight), "%.4f", rows[k].weight);
      out << "<span class=\"tok\" style=\"" << style << "\" title=\"" << weight << "\">"
          << HtmlEscape(rows[k].token) << "</span> ";
    }
    out << "</div>\n";
    i = end;
  }
  out << "</body></html>\n";
  return out.str();
}

}  // namespace sdt
