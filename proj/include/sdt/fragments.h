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

#ifndef SDT_FRAGMENTS_H_
#define SDT_FRAGMENTS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdt/subfigure.h"

namespace sdt {

// Untyped block tags; the order is also the decoding tie-break order.
enum class BlockTag : std::uint8_t { kB = 0, kI = 1, kO = 2 };
inline constexpr std::size_t kBlockTagCount = 3;

char BlockTagChar(BlockTag tag);
BlockTag ParseBlockTag(std::string_view text);

// Explicit subfigure mentions in clause text. Recognizes "fig", "fig.",
// "figs", "figure" and "figures" followed by a list of codes: "1a", "2b-d"
// (panel range), "1-3" (figure range), "1a, b and c" (panels distributed
// over the last figure number). Matching is case-insensitive.
CodeSet ExtractMentions(std::string_view clause_text);

// Empty set -> O; same non-empty set as the previous clause -> I; else B.
std::vector<BlockTag> EncodeBlocks(std::span<const CodeSet> referred);

// Every maximal B I* run (a stray I opens a new run) receives the union of
// the explicit mentions inside it; O clauses get the empty set.
std::vector<CodeSet> DecodeBlocks(std::span<const BlockTag> bio,
                                  std::span<const CodeSet> mentioned);

struct FragmentScore {
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t clauses = 0;
  std::size_t exact_clauses = 0;  // clauses whose predicted set equals gold

  double precision() const;
  double recall() const;
  double f1() const;
  // Whole-clause set agreement, reported next to the pair-level F1.
  double exact_match() const;

  // Accumulates (clause, code) membership pairs of one paragraph.
  void Add(std::span<const CodeSet> pred, std::span<const CodeSet> gold);
};

FragmentScore FragmentF1(std::span<const CodeSet> pred,
                         std::span<const CodeSet> gold);

}  // namespace sdt

#endif  // SDT_FRAGMENTS_H_
