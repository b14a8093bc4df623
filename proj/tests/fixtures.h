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

#ifndef SDT_TESTS_FIXTURES_H_
#define SDT_TESTS_FIXTURES_H_

#include <span>
#include <string>
#include <vector>

#include "sdt/corpus.h"
#include "sdt/embeddings.h"
#include "sdt/grad_check.h"
#include "sdt/rng.h"
#include "sdt/tagger.h"

namespace sdt::testing {

// Toy dimensions for gradient checks.
inline TaggerConfig ToyConfig() {
  TaggerConfig c;
  c.c = 3;
  c.w = 4;
  c.d = 8;
  c.p = 5;
  c.h = 4;
  c.d2 = 6;
  c.H = 5;
  return c;
}

// Rebuilds ModelVars from Vars listed in TaggerModel::Parameters() order.
inline ModelVars VarsFromList(std::span<const Var> p) {
  return ModelVars{EncoderVars{p[0], LstmVars{p[1], p[2], p[3]}, p[4]},
                   p[5],
                   p[6],
                   LstmVars{p[7], p[8], p[9]},
                   LstmVars{p[10], p[11], p[12]},
                   p[13],
                   p[14],
                   p[15],
                   p[16],
                   p[17]};
}

// One scidt paragraph with n clauses of random length (0..w+1 tokens) and
// random gold labels.
inline Paragraph RandomParagraph(Rng& rng, std::size_t n, std::size_t max_tokens,
                                 const LabelSet& labels) {
  Paragraph p;
  p.id = "toy";
  for (std::size_t i = 0; i < n; ++i) {
    Clause c;
    const std::size_t len = rng.Index(max_tokens + 1);
    for (std::size_t j = 0; j < len; ++j) c.tokens.push_back("w" + std::to_string(rng.Index(30)));
    c.gold_label = labels.labels()[rng.Index(labels.size())];
    p.clauses.push_back(std::move(c));
  }
  return p;
}

// Randomizes every parameter in [-scale, scale] so gradients are not tiny.
inline void Randomize(TaggerModel& model, Rng& rng, double scale) {
  for (auto& [name, t] : model.Parameters()) {
    for (double& v : t->values()) v = rng.Uniform(-scale, scale);
  }
}

// Finite-difference check of the full tagger loss on toy dimensions. The
// loss is O(10), so central differences carry ~1e-11 of rounding; entries
// below the 1e-6 floor are compared in absolute terms.
inline constexpr double kTaggerGradFloor = 1e-6;

inline GradCheckResult TaggerGradCheck(std::uint64_t seed) {
  Rng rng(seed);
  const TaggerConfig cfg = ToyConfig();
  TaggerModel model = TaggerModel::Initialize(cfg, ScidtLabels(), seed);
  Randomize(model, rng, 0.5);
  Paragraph para = RandomParagraph(rng, cfg.c, cfg.w + 1, ScidtLabels());
  para.clauses[rng.Index(cfg.c)].tokens = {"w1", "w2"};  // at least one active clause
  Corpus corpus{ScidtLabels(), {para}, Split::kUnsplit};
  const EmbeddingStore store = HashedEmbeddings(corpus, cfg.d, seed);
  const EmbeddedParagraph ep = EmbedClauses(store.Get("toy"), cfg.d, 0, cfg.c, cfg.w);
  const std::vector<std::size_t> gold = model.scheme().Encode(para.GoldLabels());
  std::vector<Tensor> params;
  for (const auto& [name, t] : model.Parameters()) params.push_back(*t);
  const TapeFunction f = [&](Tape&, std::span<const Var> p) {
    return ParagraphLoss(VarsFromList(p), model, ep, gold);
  };
  return GradCheck(f, params, 1e-5, kTaggerGradFloor);
}

}  // namespace sdt::testing

#endif  // SDT_TESTS_FIXTURES_H_
