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

#ifndef SDT_CORPUS_H_
#define SDT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdt/subfigure.h"

namespace sdt {

class LabelSet {
 public:
  LabelSet() = default;
  // Throws if labels are empty, duplicated, or none_label is missing.
  LabelSet(std::string name, std::vector<std::string> labels,
           std::string none_label);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& none_label() const { return none_label_; }
  std::size_t size() const { return labels_.size(); }

  bool Contains(std::string_view label) const;
  std::size_t IndexOf(std::string_view label) const;  // throws if absent
  std::size_t none_index() const { return IndexOf(none_label_); }

  // B_x / I_x per non-none label, plus O.
  std::size_t BioSize() const { return 2 * (labels_.size() - 1) + 1; }

  bool operator==(const LabelSet&) const = default;

 private:
  std::string name_;
  std::vector<std::string> labels_;
  std::string none_label_;
};

// Built-in taxonomies.
LabelSet ScidtLabels();
LabelSet RctLabels();
LabelSet CodaLabels();
LabelSet ClaimLabels();
std::optional<LabelSet> BuiltinLabels(std::string_view name);

struct Clause {
  std::vector<std::string> tokens;
  std::string raw_text;
  std::optional<std::string> gold_label;

  bool operator==(const Clause&) const = default;
};

struct Paragraph {
  std::string id;
  std::vector<Clause> clauses;
  std::optional<FragmentAnnotation> fragment;

  std::vector<std::string> GoldLabels() const;  // throws if any is missing
  bool operator==(const Paragraph&) const = default;
};

enum class Split { kTrain, kDev, kTest, kUnsplit };
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct Corpus {
  LabelSet label_set;
  std::vector<Paragraph> paragraphs;
  Split split = Split::kUnsplit;

  std::size_t ClauseCount() const;
  // Checks every invariant; throws ValidationError naming the offender.
  void Validate() const;
  bool operator==(const Corpus&) const = default;
};

// Lowercases and splits on whitespace.
std::vector<std::string> Tokenize(std::string_view text);

// Importers. Errors carry the file name and line number.
Corpus ParseRct(const std::filesystem::path& path);
Corpus ParseScidt(const std::filesystem::path& path);
Corpus ParseCoda(const std::filesystem::path& path);

// Canonical JSONL: an optional header line {"label_set": ..., "split": ...}
// followed by one paragraph object per line. Without a header the caller
// must supply the label set.
Corpus ReadJsonl(const std::filesystem::path& path,
                 const std::optional<LabelSet>& label_set = std::nullopt);
void WriteJsonl(const Corpus& corpus, const std::filesystem::path& path);
Corpus ParseJsonl(std::string_view text,
                  const std::optional<LabelSet>& label_set = std::nullopt,
                  const std::string& source = "<memory>");
std::string ToJsonl(const Corpus& corpus);

// Deterministic shuffle-and-split; `ratio` of paragraphs (rounded, at least
// one when ratio > 0 and the corpus has two or more paragraphs) go to the
// second corpus.
std::pair<Corpus, Corpus> SplitCorpus(const Corpus& corpus, double ratio,
                                      std::uint64_t seed);

// BIO expansion of a label set. Tag indices are B_x, I_x for each non-none
// label in label order, then O last.
class BioScheme {
 public:
  explicit BioScheme(LabelSet label_set);

  const LabelSet& label_set() const { return label_set_; }
  std::size_t size() const { return names_.size(); }
  std::size_t outside() const { return names_.size() - 1; }
  const std::string& TagName(std::size_t tag) const { return names_.at(tag); }
  std::size_t TagIndex(std::string_view name) const;  // throws if absent

  bool IsBegin(std::size_t tag) const { return tag != outside() && tag % 2 == 0; }
  bool IsInside(std::size_t tag) const { return tag != outside() && tag % 2 == 1; }
  // Label index of a B/I tag; the none label for O.
  std::size_t LabelOf(std::size_t tag) const;

  std::vector<std::size_t> Encode(std::span<const std::string> labels) const;
  std::vector<std::string> Decode(std::span<const std::size_t> tags) const;

 private:
  LabelSet label_set_;
  std::vector<std::string> names_;
  std::vector<std::size_t> label_to_begin_;  // per label index; O for none
};

std::vector<std::string> EncodeBio(std::span<const std::string> labels,
                                   const LabelSet& label_set);
std::vector<std::string> DecodeBio(std::span<const std::string> bio,
                                   const LabelSet& label_set);

}  // namespace sdt

#endif  // SDT_CORPUS_H_
