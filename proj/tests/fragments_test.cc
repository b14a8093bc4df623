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

#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "sdt/error.h"
#include "sdt/fragments.h"
#include "sdt/rng.h"

namespace sdt {
namespace {

SubfigureCode C(const char* s) { return *SubfigureCode::Parse(s); }
CodeSet Set(std::initializer_list<const char*> codes) {
  CodeSet out;
  for (const char* c : codes) out.insert(C(c));
  return out;
}

constexpr BlockTag B = BlockTag::kB;
constexpr BlockTag I = BlockTag::kI;
constexpr BlockTag O = BlockTag::kO;

TEST(SubfigureCodeTest, ParseAndOrder) {
  EXPECT_EQ(C("1a").ToString(), "1A");
  EXPECT_EQ(C("3").ToString(), "3");
  EXPECT_FALSE(SubfigureCode::Parse("0a").has_value());
  EXPECT_FALSE(SubfigureCode::Parse("a1").has_value());
  EXPECT_FALSE(SubfigureCode::Parse("1ab").has_value());
  EXPECT_FALSE(SubfigureCode::Parse("").has_value());
  EXPECT_LT(C("1"), C("1A"));
  EXPECT_LT(C("1Z"), C("2"));
  EXPECT_NE(C("3"), C("3A"));
}

TEST(ExtractMentionsTest, GrammarExamples) {
  EXPECT_EQ(ExtractMentions("( figure 1a )"), Set({"1A"}));
  EXPECT_EQ(ExtractMentions("figures 2b and 2c"), Set({"2B", "2C"}));
  EXPECT_EQ(ExtractMentions("fig . 3a - c"), Set({"3A", "3B", "3C"}));
  EXPECT_EQ(ExtractMentions("Fig. 4"), Set({"4"}));
  EXPECT_EQ(ExtractMentions("FIG 5D"), Set({"5D"}));
  EXPECT_TRUE(ExtractMentions("the figure shows nothing").empty());
  EXPECT_TRUE(ExtractMentions("").empty());
  EXPECT_TRUE(ExtractMentions("configure 1a").empty());
}

TEST(ExtractMentionsTest, IdempotentOnCanonicalForm) {
  for (int figure = 1; figure <= 12; ++figure) {
    for (char panel : std::string("\0ABCDZ", 6)) {
      const SubfigureCode code{figure, panel};
      EXPECT_EQ(ExtractMentions("fig " + code.ToString()), CodeSet{code}) << code.ToString();
    }
  }
}

TEST(EncodeBlocksTest, Examples) {
  const std::vector<CodeSet> r{Set({"1A"}), Set({"1A"}), Set({"1B", "1C"}), {}, Set({"1B", "1C"})};
  EXPECT_EQ(EncodeBlocks(r), (std::vector<BlockTag>{B, I, B, O, B}));
  EXPECT_EQ(EncodeBlocks(std::vector<CodeSet>(4)), std::vector<BlockTag>(4, O));
  EXPECT_TRUE(EncodeBlocks({}).empty());
}

TEST(DecodeBlocksTest, Examples) {
  const std::vector<BlockTag> bio{B, I, B, O, B};
  const std::vector<CodeSet> m{Set({"1A"}), {}, Set({"1B"}), {}, Set({"1B", "1C"})};
  EXPECT_EQ(DecodeBlocks(bio, m),
            (std::vector<CodeSet>{Set({"1A"}), Set({"1A"}), Set({"1B"}), {}, Set({"1B", "1C"})}));
  // A block without any mention decodes to empty sets.
  EXPECT_EQ(DecodeBlocks(std::vector<BlockTag>{B, I}, std::vector<CodeSet>(2)),
            std::vector<CodeSet>(2));
  // Stray I after O opens a new block.
  EXPECT_EQ(DecodeBlocks(std::vector<BlockTag>{O, I, I},
                         std::vector<CodeSet>{Set({"9"}), Set({"2A"}), {}}),
            (std::vector<CodeSet>{{}, Set({"2A"}), Set({"2A"})}));
  EXPECT_THROW(DecodeBlocks(bio, std::vector<CodeSet>(2)), Error);
}

TEST(BlockTagTest, CharsRoundTrip) {
  for (BlockTag t : {B, I, O}) {
    EXPECT_EQ(ParseBlockTag(std::string(1, BlockTagChar(t))), t);
  }
  EXPECT_THROW(ParseBlockTag("X"), Error);
}

CodeSet RandomCodes(Rng& rng) {
  CodeSet s;
  const std::size_t n = 1 + rng.Index(3);
  while (s.size() < n) {
    const char panel = rng.Bernoulli(0.2) ? '\0' : static_cast<char>('A' + rng.Index(6));
    s.insert(SubfigureCode{1 + static_cast<int>(rng.Index(4)), panel});
  }
  return s;
}

// Random paragraphs where every block mentions all its codes somewhere.
TEST(BlockPropertyTest, RoundTripOnCompliantParagraphs) {
  Rng rng(31);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<CodeSet> referred, mentioned;
    const std::size_t segments = 1 + rng.Index(5);
    for (std::size_t s = 0; s < segments; ++s) {
      if (rng.Bernoulli(0.3)) {
        const std::size_t len = 1 + rng.Index(2);
        for (std::size_t k = 0; k < len; ++k) {
          referred.emplace_back();
          // Mentions outside blocks are ignored by the decoder.
          mentioned.push_back(rng.Bernoulli(0.3) ? RandomCodes(rng) : CodeSet{});
        }
        continue;
      }
      CodeSet codes = RandomCodes(rng);
      if (!referred.empty() && referred.back() == codes) continue;
      const std::size_t len = 1 + rng.Index(4);
      std::vector<CodeSet> block_mentions(len);
      for (const SubfigureCode& c : codes) block_mentions[rng.Index(len)].insert(c);
      for (std::size_t k = 0; k < len; ++k) {
        referred.push_back(codes);
        mentioned.push_back(block_mentions[k]);
      }
    }
    const std::vector<BlockTag> bio = EncodeBlocks(referred);
    ASSERT_EQ(DecodeBlocks(bio, mentioned), referred);
    for (std::size_t i = 0; i < bio.size(); ++i) {
      if (bio[i] == I) ASSERT_TRUE(i > 0 && bio[i - 1] != O);
    }
  }
}

TEST(FragmentF1Test, Examples) {
  const std::vector<CodeSet> gold{Set({"1A"}), Set({"1A", "1B"}), {}};
  const FragmentScore same = FragmentF1(gold, gold);
  EXPECT_EQ(same.f1(), 1.0);
  EXPECT_EQ(same.exact_match(), 1.0);
  EXPECT_EQ(FragmentF1(std::vector<CodeSet>(3), gold).f1(), 0.0);

  const std::vector<CodeSet> pred{Set({"1A"}), Set({"1A", "2"}), Set({"3"})};
  const FragmentScore s = FragmentF1(pred, gold);
  EXPECT_EQ(s.true_positives, 2u);
  EXPECT_EQ(s.false_positives, 2u);
  EXPECT_EQ(s.false_negatives, 1u);
  EXPECT_DOUBLE_EQ(s.precision(), 0.5);
  EXPECT_DOUBLE_EQ(s.recall(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.f1(), 4.0 / 7.0);
  EXPECT_DOUBLE_EQ(s.exact_match(), 1.0 / 3.0);
  EXPECT_THROW(FragmentF1(pred, std::vector<CodeSet>(2)), Error);
}

TEST(FragmentF1Test, AccumulatesMicroCounts) {
  FragmentScore total;
  total.Add(std::vector<CodeSet>{Set({"1A"})}, std::vector<CodeSet>{Set({"1A"})});
  total.Add(std::vector<CodeSet>{{}}, std::vector<CodeSet>{Set({"2"})});
  EXPECT_EQ(total.true_positives, 1u);
  EXPECT_EQ(total.false_negatives, 1u);
  EXPECT_EQ(total.clauses, 2u);
  EXPECT_DOUBLE_EQ(total.f1(), 2.0 / 3.0);
  EXPECT_EQ(FragmentScore{}.f1(), 0.0);
}

}  // namespace
}  // namespace sdt
