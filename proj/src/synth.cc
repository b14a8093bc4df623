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

#include "sdt/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sdt/error.h"
#include "sdt/rng.h"

namespace sdt {
namespace {

std::size_t Between(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + rng.Index(hi - lo + 1);
}

std::string Filler(Rng& rng, std::size_t vocabulary) {
  return "w" + std::to_string(rng.Index(vocabulary));
}

Clause MakeClause(const std::vector<std::string>& words, const std::string& label) {
  Clause c;
  for (const std::string& w : words) c.raw_text += (c.raw_text.empty() ? "" : " ") + w;
  c.tokens = Tokenize(c.raw_text);
  c.gold_label = label;
  return c;
}

}  // namespace

std::string KeywordToken(std::size_t group, std::size_t k) {
  return "key" + std::to_string(group) + "x" + std::to_string(k);
}

Corpus KeywordCorpus(const LabelSet& label_set, const KeywordCorpusOptions& options,
                     std::uint64_t seed, std::span<const std::vector<std::size_t>> groups) {
  if (!groups.empty() && groups.size() != label_set.size()) {
    throw ValidationError("keyword corpus: one group list per label required");
  }
  if (options.min_clauses == 0 || options.min_clauses > options.max_clauses ||
      options.min_filler > options.max_filler || options.keywords_per_group == 0 ||
      options.filler_vocabulary == 0) {
    throw ValidationError("keyword corpus: inconsistent options");
  }
  Rng rng(seed);
  Corpus corpus;
  corpus.label_set = label_set;
  for (std::size_t p = 0; p < options.paragraphs; ++p) {
    Paragraph paragraph;
    paragraph.id = options.id_prefix + std::to_string(p);
    const std::size_t n = Between(rng, options.min_clauses, options.max_clauses);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t label = rng.Index(label_set.size());
      std::size_t group = label;
      if (!groups.empty()) {
        if (groups[label].empty()) throw ValidationError("keyword corpus: empty group list");
        group = groups[label][rng.Index(groups[label].size())];
      }
      std::vector<std::string> words;
      const std::size_t filler = Between(rng, options.min_filler, options.max_filler);
      for (std::size_t k = 0; k < filler; ++k) words.push_back(Filler(rng, options.filler_vocabulary));
      const std::string keyword = KeywordToken(group, rng.Index(options.keywords_per_group));
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.Index(filler + 1)), keyword);
      paragraph.clauses.push_back(MakeClause(words, label_set.labels()[label]));
    }
    corpus.paragraphs.push_back(std::move(paragraph));
  }
  return corpus;
}

std::vector<std::size_t> RandomPermutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(perm));
  return perm;
}

Corpus PermutedKeywordCorpus(const LabelSet& source, std::span<const std::size_t> perm,
                             const KeywordCorpusOptions& options, std::uint64_t seed) {
  const std::size_t n = source.size();
  if (perm.size() != n) throw ValidationError("permutation size does not match label set");
  std::vector<std::string> labels(n);
  for (std::size_t s = 0; s < n; ++s) labels[s] = "t" + std::to_string(s);
  // Target label t draws keywords of the source label mapped onto it.
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (perm[s] >= n) throw ValidationError("permutation entry out of range");
    groups[perm[s]].push_back(s);
  }
  for (const auto& g : groups) {
    if (g.size() != 1) throw ValidationError("not a permutation");
  }
  const LabelSet target(source.name() + "_permuted", labels,
                        labels[perm[source.none_index()]]);
  return KeywordCorpus(target, options, seed, groups);
}

double BlockCorpus::expected_f1() const {
  const double denom = 2.0 * static_cast<double>(expected_tp) +
                       static_cast<double>(expected_fp) + static_cast<double>(expected_fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(expected_tp) / denom;
}

BlockCorpus GenerateBlockCorpus(const BlockCorpusOptions& options, std::uint64_t seed) {
  if (options.min_segments == 0 || options.min_segments > options.max_segments ||
      options.max_block_length == 0 || options.max_outside_length == 0 ||
      options.max_codes == 0 || options.violation_rate < 0.0 || options.violation_rate > 1.0) {
    throw ValidationError("block corpus: inconsistent options");
  }
  Rng rng(seed);
  const LabelSet labels = ScidtLabels();

  struct Block {
    std::size_t paragraph, begin, end;
    CodeSet codes;
  };
  struct Draft {
    std::size_t clauses = 0;
    std::vector<std::string> tags;
  };
  std::vector<Draft> drafts(options.paragraphs);
  std::vector<Block> blocks;

  auto random_code = [&]() {
    SubfigureCode code;
    code.figure = static_cast<int>(1 + rng.Index(6));
    code.panel = rng.Bernoulli(0.2) ? '\0' : static_cast<char>('A' + rng.Index(6));
    return code;
  };

  for (std::size_t p = 0; p < options.paragraphs; ++p) {
    Draft& d = drafts[p];
    const std::size_t segments = Between(rng, options.min_segments, options.max_segments);
    const CodeSet* previous = nullptr;  // codes of an immediately preceding block
    for (std::size_t s = 0; s < segments; ++s) {
      if (rng.Bernoulli(options.outside_probability)) {
        const std::size_t len = Between(rng, 1, options.max_outside_length);
        for (std::size_t k = 0; k < len; ++k) d.tags.push_back(rng.Bernoulli(0.5) ? "fact" : "none");
        d.clauses += len;
        previous = nullptr;
        continue;
      }
      Block b{p, d.clauses, 0, {}};
      do {
        b.codes.clear();
        const std::size_t m = Between(rng, 1, options.max_codes);
        while (b.codes.size() < m) b.codes.insert(random_code());
      } while (previous != nullptr && *previous == b.codes);
      const std::size_t len = Between(rng, 1, options.max_block_length);
      d.tags.push_back("method");
      for (std::size_t k = 1; k < len; ++k) d.tags.push_back("result");
      d.clauses += len;
      b.end = d.clauses;
      blocks.push_back(std::move(b));
      previous = &blocks.back().codes;
    }
  }

  BlockCorpus out;
  out.blocks = blocks.size();
  out.violating_blocks = static_cast<std::size_t>(
      std::llround(options.violation_rate * static_cast<double>(blocks.size())));
  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.Shuffle(std::span<std::size_t>(order));
  std::vector<bool> violating(blocks.size(), false);
  for (std::size_t i = 0; i < out.violating_blocks; ++i) violating[order[i]] = true;

  std::vector<std::vector<CodeSet>> referred(options.paragraphs);
  std::vector<std::vector<CodeSet>> mentioned(options.paragraphs);
  for (std::size_t p = 0; p < options.paragraphs; ++p) {
    referred[p].assign(drafts[p].clauses, {});
    mentioned[p].assign(drafts[p].clauses, {});
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    const std::size_t len = b.end - b.begin;
    for (std::size_t c = b.begin; c < b.end; ++c) referred[b.paragraph][c] = b.codes;
    if (violating[i]) {
      const SubfigureCode foreign{9, static_cast<char>('A' + rng.Index(6))};
      mentioned[b.paragraph][b.begin + rng.Index(len)].insert(foreign);
      out.expected_fn += len * b.codes.size();
      out.expected_fp += len;
    } else {
      for (const SubfigureCode& code : b.codes) {
        mentioned[b.paragraph][b.begin + rng.Index(len)].insert(code);
      }
      out.expected_tp += len * b.codes.size();
    }
  }

  Corpus& corpus = out.corpus;
  corpus.label_set = labels;
  for (std::size_t p = 0; p < options.paragraphs; ++p) {
    Paragraph paragraph;
    paragraph.id = options.id_prefix + std::to_string(p);
    for (std::size_t c = 0; c < drafts[p].clauses; ++c) {
      const std::size_t filler = Between(rng, 2, 5);
      std::vector<std::string> fill;
      for (std::size_t k = 0; k < filler; ++k) fill.push_back(Filler(rng, 30));
      // Mentions go into gaps between filler words so they never nest.
      std::vector<std::vector<std::string>> gaps(filler + 1);
      for (const SubfigureCode& code : mentioned[p][c]) {
        std::string code_text = std::to_string(code.figure);
        if (code.panel != '\0') code_text.push_back(static_cast<char>(code.panel - 'A' + 'a'));
        auto& gap = gaps[rng.Index(filler + 1)];
        gap.insert(gap.end(), {"(", "fig", code_text, ")"});
      }
      std::vector<std::string> words;
      for (std::size_t k = 0; k <= filler; ++k) {
        words.insert(words.end(), gaps[k].begin(), gaps[k].end());
        if (k < filler) words.push_back(fill[k]);
      }
      std::string tag = drafts[p].tags[c];
      if (options.tag_noise > 0.0 && rng.Bernoulli(options.tag_noise)) {
        tag = labels.labels()[rng.Index(labels.size())];
      }
      paragraph.clauses.push_back(MakeClause(words, tag));
    }
    paragraph.fragment = FragmentAnnotation{referred[p], mentioned[p]};
    corpus.paragraphs.push_back(std::move(paragraph));
  }
  return out;
}

}  // namespace sdt
