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

#include "sdt/fragments.h"

#include <cctype>
#include <optional>

#include "sdt/error.h"

namespace sdt {
namespace {

enum class LexKind { kWord, kNumber, kPunct, kOther };

struct Lexeme {
  LexKind kind;
  std::string text;    // lowercase
  int number = 0;      // kNumber: leading digits
  std::string letters; // kNumber: trailing letters
};

bool IsDash(std::string_view p) {
  return p == "-" || p == "\xE2\x80\x93" || p == "\xE2\x80\x94" ||
         p == "\xE2\x80\x90" || p == "\xE2\x80\x91";
}

std::vector<Lexeme> Lex(std::string_view text) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char ch = static_cast<unsigned char>(text[i]);
    if (std::isspace(ch)) {
      ++i;
      continue;
    }
    if (std::isalnum(ch)) {
      std::size_t j = i;
      std::string run;
      while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) {
        run.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
        ++j;
      }
      Lexeme lx{LexKind::kOther, run, 0, {}};
      std::size_t digits = 0;
      while (digits < run.size() && std::isdigit(static_cast<unsigned char>(run[digits]))) {
        ++digits;
      }
      if (digits == 0) {
        lx.kind = LexKind::kWord;
      } else {
        bool letters_only = true;
        for (std::size_t k = digits; k < run.size(); ++k) {
          if (!std::isalpha(static_cast<unsigned char>(run[k]))) letters_only = false;
        }
        if (letters_only && digits <= 4) {
          lx.kind = LexKind::kNumber;
          lx.number = std::stoi(run.substr(0, digits));
          lx.letters = run.substr(digits);
        }
      }
      out.push_back(std::move(lx));
      i = j;
      continue;
    }
    // Keep UTF-8 sequences (dashes) together.
    std::size_t len = 1;
    if (ch >= 0xF0) {
      len = 4;
    } else if (ch >= 0xE0) {
      len = 3;
    } else if (ch >= 0xC0) {
      len = 2;
    }
    len = std::min(len, text.size() - i);
    out.push_back(Lexeme{LexKind::kPunct, std::string(text.substr(i, len)), 0, {}});
    i += len;
  }
  return out;
}

bool IsFigureKeyword(const Lexeme& lx) {
  return lx.kind == LexKind::kWord &&
         (lx.text == "fig" || lx.text == "figs" || lx.text == "figure" ||
          lx.text == "figures");
}

bool IsListSeparator(const Lexeme& lx) {
  return (lx.kind == LexKind::kPunct && (lx.text == "," || lx.text == "&" ||
                                         lx.text == ";")) ||
         (lx.kind == LexKind::kWord && (lx.text == "and" || lx.text == "or"));
}

bool IsRangeSeparator(const Lexeme& lx) {
  return (lx.kind == LexKind::kPunct && IsDash(lx.text)) ||
         (lx.kind == LexKind::kWord && lx.text == "to");
}

bool IsPanelLetter(const Lexeme& lx) {
  return lx.kind == LexKind::kWord && lx.text.size() == 1;
}

char Upper(char c) {
  return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
}

// Parses the code list after a keyword. Returns the index just past it.
std::size_t ParseCodeList(const std::vector<Lexeme>& lx, std::size_t pos,
                          CodeSet& out) {
  // A bare letter only counts as a panel when it is not followed by a
  // regular word ("figures 2b and a control" must not yield 2A).
  auto letter_ok = [&](std::size_t k) {
    if (!IsPanelLetter(lx[k])) return false;
    if (k + 1 >= lx.size()) return true;
    const Lexeme& next = lx[k + 1];
    return next.kind != LexKind::kWord || IsListSeparator(next) ||
           IsRangeSeparator(next) || IsFigureKeyword(next);
  };

  int figure = 0;
  std::optional<SubfigureCode> last;
  bool expect_item = true;
  bool range_pending = false;

  auto add_number = [&](const Lexeme& item) {
    figure = item.number;
    if (item.letters.empty()) {
      last = SubfigureCode{figure, '\0'};
      out.insert(*last);
    } else {
      for (char c : item.letters) {
        last = SubfigureCode{figure, Upper(c)};
        out.insert(*last);
      }
    }
  };

  while (pos < lx.size()) {
    const Lexeme& cur = lx[pos];
    if (expect_item) {
      if (cur.kind == LexKind::kNumber && cur.number > 0) {
        if (range_pending && last) {
          const SubfigureCode from = *last;
          const bool panel_range = from.panel != '\0' && cur.letters.size() == 1 &&
                                   cur.number == from.figure;
          const bool figure_range = from.panel == '\0' && cur.letters.empty() &&
                                    cur.number > from.figure && cur.number - from.figure <= 50;
          if (panel_range) {
            for (char c = static_cast<char>(from.panel + 1); c < Upper(cur.letters[0]); ++c) {
              out.insert(SubfigureCode{from.figure, c});
            }
          } else if (figure_range) {
            for (int f = from.figure + 1; f < cur.number; ++f) {
              out.insert(SubfigureCode{f, '\0'});
            }
          }
        }
        add_number(cur);
      } else if (figure > 0 && letter_ok(pos)) {
        const char panel = Upper(cur.text[0]);
        if (range_pending && last && last->panel != '\0' && panel > last->panel) {
          for (char c = static_cast<char>(last->panel + 1); c < panel; ++c) {
            out.insert(SubfigureCode{figure, c});
          }
        }
        last = SubfigureCode{figure, panel};
        out.insert(*last);
      } else {
        return pos;
      }
      range_pending = false;
      expect_item = false;
      ++pos;
      continue;
    }
    if (IsListSeparator(cur)) {
      expect_item = true;
    } else if (IsRangeSeparator(cur)) {
      expect_item = true;
      range_pending = true;
    } else if (last && last->panel == '\0' && letter_ok(pos)) {
      // "figure 3 a": a panel letter split from its number.
      out.erase(*last);
      last = SubfigureCode{figure, Upper(cur.text[0])};
      out.insert(*last);
    } else {
      return pos;
    }
    ++pos;
  }
  return pos;
}

}  // namespace

char BlockTagChar(BlockTag tag) {
  switch (tag) {
    case BlockTag::kB: return 'B';
    case BlockTag::kI: return 'I';
    case BlockTag::kO: return 'O';
  }
  return 'O';
}

BlockTag ParseBlockTag(std::string_view text) {
  if (text == "B") return BlockTag::kB;
  if (text == "I") return BlockTag::kI;
  if (text == "O") return BlockTag::kO;
  throw ValidationError("unknown block tag '" + std::string(text) + "'");
}

CodeSet ExtractMentions(std::string_view clause_text) {
  const std::vector<Lexeme> lx = Lex(clause_text);
  CodeSet out;
  std::size_t pos = 0;
  while (pos < lx.size()) {
    if (!IsFigureKeyword(lx[pos])) {
      ++pos;
      continue;
    }
    ++pos;
    if (pos < lx.size() && lx[pos].kind == LexKind::kPunct && lx[pos].text == ".") ++pos;
    const std::size_t next = ParseCodeList(lx, pos, out);
    pos = next > pos ? next : pos;
  }
  return out;
}

std::vector<BlockTag> EncodeBlocks(std::span<const CodeSet> referred) {
  std::vector<BlockTag> tags;
  tags.reserve(referred.size());
  for (std::size_t i = 0; i < referred.size(); ++i) {
    if (referred[i].empty()) {
      tags.push_back(BlockTag::kO);
    } else if (i > 0 && referred[i] == referred[i - 1]) {
      tags.push_back(BlockTag::kI);
    } else {
      tags.push_back(BlockTag::kB);
    }
  }
  return tags;
}

std::vector<CodeSet> DecodeBlocks(std::span<const BlockTag> bio,
                                  std::span<const CodeSet> mentioned) {
  if (bio.size() != mentioned.size()) {
    throw ValidationError("decode_blocks: " + std::to_string(bio.size()) +
                          " tags but " + std::to_string(mentioned.size()) +
                          " mention sets");
  }
  std::vector<CodeSet> out(bio.size());
  std::size_t i = 0;
  while (i < bio.size()) {
    if (bio[i] == BlockTag::kO) {
      ++i;
      continue;
    }
    // B or stray I opens a block; I continues it.
    std::size_t end = i + 1;
    while (end < bio.size() && bio[end] == BlockTag::kI) ++end;
    CodeSet block;
    for (std::size_t k = i; k < end; ++k) {
      block.insert(mentioned[k].begin(), mentioned[k].end());
    }
    for (std::size_t k = i; k < end; ++k) out[k] = block;
    i = end;
  }
  return out;
}

double FragmentScore::precision() const {
  const std::size_t d = true_positives + false_positives;
  return d == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(d);
}

double FragmentScore::recall() const {
  const std::size_t d = true_positives + false_negatives;
  return d == 0 ? 0.0 : static_cast<double>(true_positives) / static_cast<double>(d);
}

double FragmentScore::f1() const {
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double FragmentScore::exact_match() const {
  return clauses == 0 ? 0.0
                      : static_cast<double>(exact_clauses) / static_cast<double>(clauses);
}

void FragmentScore::Add(std::span<const CodeSet> pred, std::span<const CodeSet> gold) {
  if (pred.size() != gold.size()) {
    throw ValidationError("fragment_f1: " + std::to_string(pred.size()) +
                          " predicted clauses vs " + std::to_string(gold.size()) +
                          " gold clauses");
  }
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (const SubfigureCode& c : pred[i]) {
      if (gold[i].count(c)) {
        ++true_positives;
      } else {
        ++false_positives;
      }
    }
    for (const SubfigureCode& c : gold[i]) {
      if (!pred[i].count(c)) ++false_negatives;
    }
    ++clauses;
    if (pred[i] == gold[i]) ++exact_clauses;
  }
}

FragmentScore FragmentF1(std::span<const CodeSet> pred, std::span<const CodeSet> gold) {
  FragmentScore score;
  score.Add(pred, gold);
  return score;
}

}  // namespace sdt
