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

#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "sdt/encoder.h"
#include "sdt/error.h"
#include "sdt/grad_check.h"
#include "sdt/ops.h"
#include "test_util.h"

namespace sdt {
namespace {

using testing::RandomTensor;

double Sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Plain-loop LSTM over rows of x; gates ordered i, f, o, g.
std::vector<std::vector<double>> NaiveLstm(const Tensor& x, const LstmParams& p, bool reverse,
                                           const std::vector<double>* mask) {
  const std::size_t n = x.rows(), in = x.cols(), h = p.hidden();
  std::vector<std::vector<double>> out(n);
  std::vector<double> hs(h, 0.0), cs(h, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t t = reverse ? n - 1 - k : k;
    std::vector<double> z(4 * h);
    for (std::size_t j = 0; j < 4 * h; ++j) {
      double s = p.bias[j];
      for (std::size_t a = 0; a < in; ++a) s += x(t, a) * p.input_weights(a, j);
      for (std::size_t a = 0; a < h; ++a) {
        const double prev = hs[a] * (mask ? (*mask)[a] : 1.0);
        s += prev * p.recurrent_weights(a, j);
      }
      z[j] = s;
    }
    for (std::size_t a = 0; a < h; ++a) {
      const double i = Sigm(z[a]), f = Sigm(z[h + a]), o = Sigm(z[2 * h + a]);
      const double g = std::tanh(z[3 * h + a]);
      cs[a] = f * cs[a] + i * g;
      hs[a] = o * std::tanh(cs[a]);
    }
    out[t] = hs;
  }
  return out;
}

LstmVars Refs(Tape& tape, const LstmParams& p) {
  return {tape.Reference(p.input_weights), tape.Reference(p.recurrent_weights),
          tape.Reference(p.bias)};
}

TEST(LstmTest, MatchesUnrolledLoops) {
  Rng rng(11);
  for (bool reverse : {false, true}) {
    for (bool masked : {false, true}) {
      LstmParams p = LstmParams::Initialize(3, 4, rng);
      for (double& v : p.input_weights.values()) v = rng.Uniform(-1, 1);
      for (double& v : p.recurrent_weights.values()) v = rng.Uniform(-1, 1);
      const Tensor x = RandomTensor({5, 3}, rng);
      const Tensor mask_t = Tensor::Row({2.0, 0.0, 1.0, 0.5});
      const std::vector<double> mask(mask_t.values().begin(), mask_t.values().end());
      Tape tape;
      LstmOptions options;
      options.reverse = reverse;
      if (masked) options.recurrent_mask = &mask_t;
      const std::vector<Var> states = RunLstm(Refs(tape, p), tape.Constant(x), 4, options);
      const auto ref = NaiveLstm(x, p, reverse, masked ? &mask : nullptr);
      for (std::size_t t = 0; t < 5; ++t) {
        for (std::size_t a = 0; a < 4; ++a) {
          EXPECT_NEAR(states[t].value()[a], ref[t][a], 1e-13) << reverse << masked;
        }
      }
    }
  }
}

TEST(LstmTest, InitializationRanges) {
  Rng rng(12);
  const LstmParams p = LstmParams::Initialize(6, 5, rng);
  EXPECT_EQ(p.input_size(), 6u);
  EXPECT_EQ(p.hidden(), 5u);
  for (std::size_t j = 0; j < 20; ++j) {
    if (j >= 5 && j < 10) {
      EXPECT_EQ(p.bias[j], 1.0);
    } else {
      EXPECT_LE(std::abs(p.bias[j]), 0.05);
    }
  }
  for (double v : p.input_weights.values()) EXPECT_LE(std::abs(v), 0.05);
}

TEST(LstmTest, RejectsWidthMismatch) {
  Rng rng(13);
  const LstmParams p = LstmParams::Initialize(3, 2, rng);
  Tape tape;
  EXPECT_THROW(RunLstm(Refs(tape, p), tape.Constant(Tensor({2, 4})), 2), Error);
}

// One record with clauses of 3, 1, 0 and 6 tokens.
EmbeddingRecord MakeRecord(Rng& rng, std::size_t d) {
  EmbeddingRecord r;
  r.paragraph_id = "r";
  for (std::size_t n : {3, 1, 0, 6}) {
    ClauseEmbedding c;
    for (std::size_t j = 0; j < n; ++j) {
      c.tokens.push_back("t" + std::to_string(j));
      for (std::size_t k = 0; k < d; ++k) c.vectors.push_back(static_cast<float>(rng.Uniform(-1, 1)));
    }
    r.clauses.push_back(c);
  }
  return r;
}

EncoderParams RandomEncoder(Rng& rng, std::size_t d, std::size_t p, std::size_t h) {
  EncoderParams e = EncoderParams::Initialize(d, p, h, rng);
  for (double& v : e.projection.values()) v = rng.Uniform(-1, 1);
  for (double& v : e.attention.input_weights.values()) v = rng.Uniform(-1, 1);
  for (double& v : e.score.values()) v = rng.Uniform(-2, 2);
  return e;
}

EncoderVars Refs(Tape& tape, const EncoderParams& e) {
  return {tape.Reference(e.projection), Refs(tape, e.attention), tape.Reference(e.score)};
}

TEST(EncoderTest, AttentionIsASimplexOverActiveTokens) {
  Rng rng(21);
  const EmbeddingRecord rec = MakeRecord(rng, 5);
  const EmbeddedParagraph ep = EmbedClauses(rec, 5, 0, 4, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const EncoderParams e = RandomEncoder(rng, 5, 4, 3);
    const Tensor a = AttentionMatrix(ep, e);
    for (std::size_t i = 0; i < ep.clauses(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < ep.width(); ++j) {
        EXPECT_GE(a(i, j), 0.0);
        if (!ep.token_active(i, j)) EXPECT_EQ(a(i, j), 0.0);
        sum += a(i, j);
      }
      EXPECT_NEAR(sum, ep.clause_mask[i] ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(EncoderTest, ZeroScoreGivesUniformAttention) {
  Rng rng(22);
  const EmbeddingRecord rec = MakeRecord(rng, 4);
  const EmbeddedParagraph ep = EmbedClauses(rec, 4, 0, 4, 0);
  EncoderParams e = RandomEncoder(rng, 4, 3, 2);
  e.score = Tensor({1, 2});
  const Tensor a = AttentionMatrix(ep, e);
  for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(a(3, j), 1.0 / 6.0, 1e-15);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(a(0, j), 1.0 / 3.0, 1e-15);
}

TEST(EncoderTest, SingleTokenClauseHasWeightOneAndCopiesEmbedding) {
  Rng rng(23);
  const EmbeddingRecord rec = MakeRecord(rng, 4);
  const EmbeddedParagraph ep = EmbedClauses(rec, 4, 0, 4, 0);
  const EncoderParams e = RandomEncoder(rng, 4, 3, 2);
  Tape tape;
  const ClauseEncoding enc = EncodeClause(Refs(tape, e), ep, 1);
  EXPECT_EQ(enc.attention.value()[0], 1.0);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_EQ(enc.summary.value()[k], ep.embeddings.at(1, 0, k));
  }
}

TEST(EncoderTest, SummaryIsAttentionWeightedSum) {
  Rng rng(24);
  const EmbeddingRecord rec = MakeRecord(rng, 5);
  const EmbeddedParagraph ep = EmbedClauses(rec, 5, 0, 4, 0);
  const EncoderParams e = RandomEncoder(rng, 5, 4, 3);
  const Tensor a = AttentionMatrix(ep, e);
  const Tensor s = Summarize(ep, a);
  Tape tape;
  for (std::size_t i : {0u, 1u, 3u}) {
    const ClauseEncoding enc = EncodeClause(Refs(tape, e), ep, i);
    for (std::size_t k = 0; k < 5; ++k) {
      double ref = 0.0;
      for (std::size_t j = 0; j < ep.width(); ++j) ref += a(i, j) * ep.embeddings.at(i, j, k);
      EXPECT_NEAR(enc.summary.value()[k], ref, 1e-13);
      EXPECT_NEAR(s(i, k), ref, 1e-13);
    }
    for (std::size_t r = 0; r < enc.positions.size(); ++r) {
      EXPECT_NEAR(enc.attention.value()[r], a(i, enc.positions[r]), 1e-14);
    }
  }
  EXPECT_THROW(EncodeClause(Refs(tape, e), ep, 2), Error);
}

TEST(EncoderTest, PaddingWidthDoesNotChangeEncoding) {
  Rng rng(25);
  const EmbeddingRecord rec = MakeRecord(rng, 5);
  const EncoderParams e = RandomEncoder(rng, 5, 4, 3);
  const EmbeddedParagraph narrow = EmbedClauses(rec, 5, 0, 1, 0);
  const EmbeddedParagraph wide = EmbedClauses(rec, 5, 0, 4, 0);
  ASSERT_LT(narrow.width(), wide.width());
  Tape tape;
  const EncoderVars vars = Refs(tape, e);
  const ClauseEncoding a = EncodeClause(vars, narrow, 0);
  const ClauseEncoding b = EncodeClause(vars, wide, 0);
  EXPECT_EQ(a.summary.value(), b.summary.value());
  EXPECT_EQ(a.attention.value(), b.attention.value());
}

TEST(EncoderTest, GradientsMatchFiniteDifferences) {
  Rng rng(26);
  const EmbeddingRecord rec = MakeRecord(rng, 3);
  const EmbeddedParagraph ep = EmbedClauses(rec, 3, 0, 4, 0);
  const EncoderParams e = RandomEncoder(rng, 3, 2, 2);
  const Tensor w = RandomTensor({1, 3}, rng);
  const TapeFunction f = [&](Tape& tape, std::span<const Var> p) {
    const EncoderVars vars{p[0], {p[1], p[2], p[3]}, p[4]};
    Var total = ops::Sum(ops::Mul(EncodeClause(vars, ep, 0).summary, tape.Constant(w)));
    return ops::Add(total, ops::Sum(ops::Mul(EncodeClause(vars, ep, 3).summary, tape.Constant(w))));
  };
  const GradCheckResult r = GradCheck(f, {e.projection, e.attention.input_weights,
                                          e.attention.recurrent_weights, e.attention.bias, e.score});
  EXPECT_LE(r.max_relative_error, 1e-6);
}

TEST(EncoderTest, ShapeChecks) {
  Rng rng(27);
  EncoderParams e = EncoderParams::Initialize(4, 3, 2, rng);
  EXPECT_NO_THROW(e.CheckShapes());
  EXPECT_EQ(e.hidden(), 2u);
  e.score = Tensor({1, 3});
  EXPECT_THROW(e.CheckShapes(), Error);
  const EmbeddingRecord rec = MakeRecord(rng, 5);
  const EmbeddedParagraph ep = EmbedClauses(rec, 5, 0, 4, 0);
  EXPECT_THROW(Project(ep, EncoderParams::Initialize(4, 3, 2, rng)), Error);
}

TEST(DropoutTest, MaskValues) {
  Dropout d(3);
  EXPECT_FALSE(d.Mask({2, 2}, 0.0).has_value());
  const Tensor m = *d.Mask({100, 100}, 0.25);
  double mean = 0.0;
  for (double v : m.values()) {
    EXPECT_TRUE(v == 0.0 || std::abs(v - 1.0 / 0.75) < 1e-15);
    mean += v;
  }
  EXPECT_NEAR(mean / 10000.0, 1.0, 0.03);
}

TEST(AttentionReportTest, RowsTsvAndHtml) {
  Rng rng(28);
  EmbeddingRecord rec = MakeRecord(rng, 4);
  rec.clauses[0].tokens[1] = "<b>";
  const EmbeddedParagraph ep = EmbedClauses(rec, 4, 0, 4, 0);
  const EncoderParams e = RandomEncoder(rng, 4, 3, 2);
  const std::vector<AttentionRow> rows = AttentionReport(ep, e);
  EXPECT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[1].token, "<b>");
  EXPECT_EQ(rows[3].clause, 1u);
  const std::string tsv = AttentionTsv(rows);
  EXPECT_EQ(tsv.rfind("clause_index\ttoken\tweight\n", 0), 0u);
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 11);
  const std::string html = AttentionHtml("demo", rows);
  EXPECT_NE(html.find("&lt;b&gt;"), std::string::npos);
  EXPECT_EQ(html.find("<b>"), std::string::npos);
}

}  // namespace
}  // namespace sdt
