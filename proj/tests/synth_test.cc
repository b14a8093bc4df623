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
#include <set>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "sdt/error.h"
#include "sdt/featcrf.h"
#include "sdt/synth.h"

namespace sdt {
namespace {

std::size_t KeywordGroupOf(const Clause& c) {
  std::set<std::size_t> groups;
  for (const std::string& t : c.tokens) {
    if (t.rfind("key", 0) == 0) groups.insert(std::stoul(t.substr(3, t.find('x') - 3)));
  }
  EXPECT_EQ(groups.size(), 1u);
  return groups.empty() ? 0 : *groups.begin();
}

TEST(KeywordCorpusTest, ShapeAndKeywordDeterminism) {
  KeywordCorpusOptions o;
  o.paragraphs = 30;
  const LabelSet s = ScidtLabels();
  const Corpus c = KeywordCorpus(s, o, 4);
  EXPECT_NO_THROW(c.Validate());
  ASSERT_EQ(c.paragraphs.size(), 30u);
  for (const Paragraph& p : c.paragraphs) {
    EXPECT_GE(p.clauses.size(), o.min_clauses);
    EXPECT_LE(p.clauses.size(), o.max_clauses);
    for (const Clause& cl : p.clauses) {
      EXPECT_EQ(KeywordGroupOf(cl), s.IndexOf(*cl.gold_label));
      EXPECT_GE(cl.tokens.size(), o.min_filler + 1);
      EXPECT_LE(cl.tokens.size(), o.max_filler + 1);
    }
  }
  EXPECT_EQ(c, KeywordCorpus(s, o, 4));
  EXPECT_NE(c, KeywordCorpus(s, o, 5));
  EXPECT_EQ(KeywordToken(3, 1), "key3x1");
}

TEST(KeywordCorpusTest, GroupsAndErrors) {
  KeywordCorpusOptions o;
  const std::vector<std::vector<std::size_t>> groups{{2, 6}, {0, 1}};
  const Corpus c = KeywordCorpus(ClaimLabels(), o, 1, groups);
  for (const Paragraph& p : c.paragraphs) {
    for (const Clause& cl : p.clauses) {
      const std::size_t g = KeywordGroupOf(cl);
      if (*cl.gold_label == "claim") {
        EXPECT_TRUE(g == 2 || g == 6);
      } else {
        EXPECT_TRUE(g == 0 || g == 1);
      }
    }
  }
  const std::vector<std::vector<std::size_t>> too_few{{1}};
  EXPECT_THROW(KeywordCorpus(ClaimLabels(), o, 1, too_few), Error);
  KeywordCorpusOptions bad = o;
  bad.min_clauses = 9;
  EXPECT_THROW(KeywordCorpus(ClaimLabels(), bad, 1), Error);
}

TEST(PermutationTest, IsSeededPermutation) {
  const std::vector<std::size_t> p = RandomPermutation(8, 3);
  EXPECT_EQ(std::set<std::size_t>(p.begin(), p.end()).size(), 8u);
  EXPECT_EQ(p, RandomPermutation(8, 3));
  EXPECT_NE(p, RandomPermutation(8, 4));
}

TEST(PermutationTest, PermutedCorpusRelabelsKeywords) {
  const LabelSet s = ScidtLabels();
  const std::vector<std::size_t> perm = RandomPermutation(s.size(), 9);
  KeywordCorpusOptions o;
  const Corpus c = PermutedKeywordCorpus(s, perm, o, 2);
  EXPECT_EQ(c.label_set.none_label(), "t" + std::to_string(perm[s.none_index()]));
  for (const Paragraph& p : c.paragraphs) {
    for (const Clause& cl : p.clauses) {
      EXPECT_EQ(*cl.gold_label, "t" + std::to_string(perm[KeywordGroupOf(cl)]));
    }
  }
  const std::vector<std::size_t> dup{0, 0, 1, 2, 3, 4, 5, 6};
  EXPECT_THROW(PermutedKeywordCorpus(s, dup, o, 2), Error);
}

TEST(BlockCorpusTest, ViolationCountAndCeiling) {
  BlockCorpusOptions o;
  o.violation_rate = 0.1;
  const BlockCorpus bc = GenerateBlockCorpus(o, 6);
  EXPECT_NO_THROW(bc.corpus.Validate());
  EXPECT_EQ(bc.violating_blocks,
            static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(bc.blocks))));
  EXPECT_GE(bc.expected_f1(), 0.85);
  EXPECT_LE(bc.expected_f1(), 0.95);
  const FragmentScore gold = GoldBlockFragments(bc.corpus);
  EXPECT_DOUBLE_EQ(gold.f1(), bc.expected_f1());
}

TEST(BlockCorpusTest, CompliantCorpusDecodesPerfectly) {
  const BlockCorpus bc = GenerateBlockCorpus(BlockCorpusOptions{}, 7);
  EXPECT_EQ(bc.violating_blocks, 0u);
  EXPECT_EQ(bc.expected_fp + bc.expected_fn, 0u);
  EXPECT_EQ(GoldBlockFragments(bc.corpus).f1(), 1.0);
}

TEST(BlockCorpusTest, MentionsAreVisibleInText) {
  const BlockCorpus bc = GenerateBlockCorpus(BlockCorpusOptions{}, 8);
  for (const Paragraph& p : bc.corpus.paragraphs) {
    ASSERT_TRUE(p.fragment.has_value());
    for (std::size_t i = 0; i < p.clauses.size(); ++i) {
      EXPECT_EQ(ExtractMentions(p.clauses[i].raw_text), p.fragment->mentioned[i]);
    }
  }
}

TEST(BlockCorpusTest, TagNoiseAndDeterminism) {
  BlockCorpusOptions o;
  o.paragraphs = 50;
  const BlockCorpus clean = GenerateBlockCorpus(o, 9);
  o.tag_noise = 0.5;
  const BlockCorpus noisy = GenerateBlockCorpus(o, 9);
  EXPECT_EQ(noisy.corpus, GenerateBlockCorpus(o, 9).corpus);
  std::size_t blocks_with_method_start = 0, starts = 0;
  for (const Paragraph& p : clean.corpus.paragraphs) {
    const std::vector<BlockTag> bio = EncodeBlocks(p.fragment->referred);
    for (std::size_t i = 0; i < bio.size(); ++i) {
      if (bio[i] != BlockTag::kB) continue;
      ++starts;
      blocks_with_method_start += *p.clauses[i].gold_label == "method";
    }
  }
  EXPECT_EQ(blocks_with_method_start, starts);
  EXPECT_NE(noisy.corpus, clean.corpus);
  o.violation_rate = 1.5;
  EXPECT_THROW(GenerateBlockCorpus(o, 9), Error);
}

}  // namespace
}  // namespace sdt
