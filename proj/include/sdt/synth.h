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

#ifndef SDT_SYNTH_H_
#define SDT_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdt/corpus.h"

namespace sdt {

// Generated corpora with known structure, used for fixtures and end-to-end
// checks.

struct KeywordCorpusOptions {
  std::size_t paragraphs = 20;
  std::size_t min_clauses = 3;
  std::size_t max_clauses = 8;
  std::size_t min_filler = 2;  // filler tokens per clause
  std::size_t max_filler = 6;
  std::size_t keywords_per_group = 2;
  std::size_t filler_vocabulary = 40;
  std::string id_prefix = "p";
};

// Keyword token k of keyword group g.
std::string KeywordToken(std::size_t group, std::size_t k);

// Every clause holds one keyword from a group tied to its gold label, at a
// random position among filler words. `groups[l]` lists the keyword groups
// label l may draw from; empty means group l for label l.
Corpus KeywordCorpus(const LabelSet& label_set, const KeywordCorpusOptions& options,
                     std::uint64_t seed,
                     std::span<const std::vector<std::size_t>> groups = {});

// Random bijection over n labels.
std::vector<std::size_t> RandomPermutation(std::size_t n, std::uint64_t seed);

// Target-side corpus for a planted permutation: a clause that would carry
// source label s in the source corpus carries target label perm[s].
Corpus PermutedKeywordCorpus(const LabelSet& source, std::span<const std::size_t> perm,
                             const KeywordCorpusOptions& options, std::uint64_t seed);

struct BlockCorpusOptions {
  std::size_t paragraphs = 200;
  std::size_t min_segments = 2;
  std::size_t max_segments = 5;
  std::size_t max_block_length = 4;
  std::size_t max_outside_length = 2;
  double outside_probability = 0.3;  // a segment is an unreferenced run
  std::size_t max_codes = 3;         // codes per block
  // Fraction of blocks (over the corpus, rounded) that mention none of
  // their codes and instead mention one unrelated code.
  double violation_rate = 0.0;
  // Probability that a clause's discourse tag is replaced by a random one.
  double tag_noise = 0.0;
  std::string id_prefix = "f";
};

// Paragraphs made of blocks and unreferenced runs. Discourse tags mark
// structure: the first clause of a block is "method", later block clauses
// "result", unreferenced clauses "fact" or "none". Mentions appear in the
// text as "( fig 2b )" and are also stored in the fragment annotation.
struct BlockCorpus {
  Corpus corpus;
  std::size_t blocks = 0;
  std::size_t violating_blocks = 0;
  // (clause, code) pair counts that gold-tag block decoding must produce.
  std::size_t expected_tp = 0;
  std::size_t expected_fp = 0;
  std::size_t expected_fn = 0;

  double expected_f1() const;
};

BlockCorpus GenerateBlockCorpus(const BlockCorpusOptions& options, std::uint64_t seed);

}  // namespace sdt

#endif  // SDT_SYNTH_H_
