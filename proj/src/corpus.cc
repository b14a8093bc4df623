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

#include "sdt/corpus.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "sdt/error.h"
#include "sdt/rng.h"

namespace sdt {

using json = nlohmann::json;

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

Error ParseError(const std::filesystem::path& path, std::size_t line,
                 const std::string& what) {
  return ValidationError(path.string() + ":" + std::to_string(line) + ": " +
                         what);
}

Clause MakeClause(std::string text, std::optional<std::string> label) {
  Clause c;
  c.tokens = Tokenize(text);
  c.raw_text = std::move(text);
  c.gold_label = std::move(label);
  return c;
}

json CodesToJson(const std::vector<CodeSet>& sets) {
  json out = json::array();
  for (const CodeSet& s : sets) out.push_back(CodeStrings(s));
  return out;
}

std::vector<CodeSet> CodesFromJson(const json& j, const std::string& where) {
  std::vector<CodeSet> out;
  for (const json& clause : j) {
    CodeSet set;
    for (const json& code : clause) {
      auto parsed = SubfigureCode::Parse(code.get<std::string>());
      if (!parsed) {
        throw ValidationError(where + ": bad subfigure code '" +
                              code.get<std::string>() + "'");
      }
      set.insert(*parsed);
    }
    out.push_back(std::move(set));
  }
  return out;
}

json LabelSetToJson(const LabelSet& ls) {
  return json{{"name", ls.name()},
              {"labels", ls.labels()},
              {"none_label", ls.none_label()}};
}

LabelSet LabelSetFromJson(const json& j) {
  return LabelSet(j.at("name").get<std::string>(),
                  j.at("labels").get<std::vector<std::string>>(),
                  j.at("none_label").get<std::string>());
}

}  // namespace

// ---------------------------------------------------------------- LabelSet

LabelSet::LabelSet(std::string name, std::vector<std::string> labels,
                   std::string none_label)
    : name_(std::move(name)),
      labels_(std::move(labels)),
      none_label_(std::move(none_label)) {
  if (labels_.empty()) throw ValidationError("label set '" + name_ + "' is empty");
  std::set<std::string> seen;
  for (const std::string& l : labels_) {
    if (l.empty()) throw ValidationError("label set '" + name_ + "' has an empty label");
    if (!seen.insert(l).second) {
      throw ValidationError("label set '" + name_ + "' repeats label '" + l + "'");
    }
  }
  if (!seen.count(none_label_)) {
    throw ValidationError("none label '" + none_label_ + "' not in label set '" +
                          name_ + "'");
  }
}

bool LabelSet::Contains(std::string_view label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t LabelSet::IndexOf(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw ValidationError("unknown label '" + std::string(label) +
                          "' for label set '" + name_ + "'");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

LabelSet ScidtLabels() {
  return LabelSet("scidt",
                  {"goal", "fact", "result", "hypothesis", "method", "problem",
                   "implication", "none"},
                  "none");
}

LabelSet RctLabels() {
  return LabelSet("rct",
                  {"background", "objective", "methods", "results",
                   "conclusions", "O_NONE"},
                  "O_NONE");
}

LabelSet CodaLabels() {
  return LabelSet("coda",
                  {"background", "purpose", "method", "finding/contribution",
                   "other"},
                  "other");
}

LabelSet ClaimLabels() { return LabelSet("claim", {"claim", "none"}, "none"); }

std::optional<LabelSet> BuiltinLabels(std::string_view name) {
  if (name == "scidt") return ScidtLabels();
  if (name == "rct") return RctLabels();
  if (name == "coda") return CodaLabels();
  if (name == "claim") return ClaimLabels();
  return std::nullopt;
}

// ---------------------------------------------------------------- Corpus

std::vector<std::string> Paragraph::GoldLabels() const {
  std::vector<std::string> out;
  out.reserve(clauses.size());
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (!clauses[i].gold_label) {
      throw ValidationError("paragraph '" + id + "' clause " +
                            std::to_string(i) + " has no gold label");
    }
    out.push_back(*clauses[i].gold_label);
  }
  return out;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
    case Split::kUnsplit: return "unsplit";
  }
  return "unsplit";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  if (name == "unsplit") return Split::kUnsplit;
  throw ValidationError("unknown split '" + std::string(name) + "'");
}

std::size_t Corpus::ClauseCount() const {
  std::size_t n = 0;
  for (const Paragraph& p : paragraphs) n += p.clauses.size();
  return n;
}

void Corpus::Validate() const {
  for (const Paragraph& p : paragraphs) {
    if (p.clauses.empty()) {
      throw ValidationError("paragraph '" + p.id + "' has no clauses");
    }
    for (std::size_t i = 0; i < p.clauses.size(); ++i) {
      const Clause& c = p.clauses[i];
      if (c.gold_label && !label_set.Contains(*c.gold_label)) {
        throw ValidationError("paragraph '" + p.id + "' clause " +
                              std::to_string(i) + ": unknown label '" +
                              *c.gold_label + "'");
      }
      if (c.tokens.empty() && !Trim(c.raw_text).empty()) {
        throw ValidationError("paragraph '" + p.id + "' clause " +
                              std::to_string(i) + " has text but no tokens");
      }
    }
    if (p.fragment && (p.fragment->referred.size() != p.clauses.size() ||
                       p.fragment->mentioned.size() != p.clauses.size())) {
      throw ValidationError("paragraph '" + p.id +
                            "' fragment annotation does not match clause count");
    }
  }
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in(Lower(text));
  std::string tok;
  while (in >> tok) tokens.push_back(std::move(tok));
  return tokens;
}

// ---------------------------------------------------------------- Importers

Corpus ParseRct(const std::filesystem::path& path) {
  const std::vector<std::string> lines = SplitLines(ReadFile(path));
  Corpus corpus;
  corpus.label_set = RctLabels();
  Paragraph* current = nullptr;
  std::size_t header_line = 0;
  auto finish = [&]() {
    if (current != nullptr && current->clauses.empty()) {
      throw ParseError(path, header_line,
                       "record '" + current->id + "' has no sentences");
    }
  };
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string& line = lines[i];
    if (Trim(line).empty()) continue;
    if (line.rfind("###", 0) == 0) {
      finish();
      corpus.paragraphs.push_back(Paragraph{Trim(line.substr(3)), {}, {}});
      current = &corpus.paragraphs.back();
      header_line = lineno;
      continue;
    }
    if (current == nullptr) {
      throw ParseError(path, lineno, "sentence before any ### record header");
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path, lineno, "malformed line (no tab)");
    }
    const std::string label = Lower(Trim(line.substr(0, tab)));
    if (!corpus.label_set.Contains(label)) {
      throw ParseError(path, lineno, "unknown label '" + line.substr(0, tab) + "'");
    }
    current->clauses.push_back(MakeClause(Trim(line.substr(tab + 1)), label));
  }
  finish();
  return corpus;
}

Corpus ParseScidt(const std::filesystem::path& path) {
  const std::vector<std::string> lines = SplitLines(ReadFile(path));
  Corpus corpus;
  corpus.label_set = ScidtLabels();
  struct Row {
    long index;
    std::size_t line;
    std::string text;
    std::string label;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> groups;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (Trim(lines[i]).empty()) continue;
    const std::vector<std::string> f = SplitTabs(lines[i]);
    if (f.size() != 4) {
      throw ParseError(path, lineno, "expected 4 tab-separated fields, got " +
                                         std::to_string(f.size()));
    }
    if (lineno == 1 && Lower(Trim(f[0])) == "paragraph_id") continue;
    long index = 0;
    const std::string index_text = Trim(f[1]);
    const auto [end, ec] = std::from_chars(
        index_text.data(), index_text.data() + index_text.size(), index);
    if (ec != std::errc() || end != index_text.data() + index_text.size() ||
        index_text.empty()) {
      throw ParseError(path, lineno, "clause_index '" + f[1] + "' is not an integer");
    }
    const std::string label = Lower(Trim(f[3]));
    if (!corpus.label_set.Contains(label)) {
      throw ParseError(path, lineno, "unknown label '" + f[3] + "'");
    }
    const std::string pid = Trim(f[0]);
    auto [it, inserted] = groups.try_emplace(pid);
    if (inserted) order.push_back(pid);
    it->second.push_back(Row{index, lineno, f[2], label});
  }
  for (const std::string& pid : order) {
    std::vector<Row>& rows = groups[pid];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.index < b.index; });
    Paragraph p;
    p.id = pid;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k > 0 && rows[k].index != rows[k - 1].index + 1) {
        throw ParseError(path, rows[k].line,
                         "non-contiguous clause_index " +
                             std::to_string(rows[k].index) + " in paragraph '" +
                             pid + "' (previous " +
                             std::to_string(rows[k - 1].index) + ")");
      }
      p.clauses.push_back(MakeClause(Trim(rows[k].text), rows[k].label));
    }
    corpus.paragraphs.push_back(std::move(p));
  }
  return corpus;
}

Corpus ParseCoda(const std::filesystem::path& path) {
  const std::vector<std::string> lines = SplitLines(ReadFile(path));
  Corpus corpus;
  corpus.label_set = CodaLabels();
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (Trim(lines[i]).empty()) continue;
    json doc;
    try {
      doc = json::parse(lines[i]);
    } catch (const json::exception& e) {
      throw ParseError(path, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("fragments") ||
        !doc["fragments"].is_array()) {
      throw ParseError(path, lineno, "expected an object with a 'fragments' array");
    }
    Paragraph p;
    p.id = doc.contains("id") ? (doc["id"].is_string()
                                     ? doc["id"].get<std::string>()
                                     : doc["id"].dump())
                              : std::to_string(corpus.paragraphs.size());
    for (const json& frag : doc["fragments"]) {
      std::string text;
      std::string label;
      if (frag.is_array() && frag.size() == 2 && frag[0].is_string() &&
          frag[1].is_string()) {
        text = frag[0].get<std::string>();
        label = frag[1].get<std::string>();
      } else if (frag.is_object() && frag.contains("text") &&
                 frag.contains("label")) {
        text = frag["text"].get<std::string>();
        label = frag["label"].get<std::string>();
      } else {
        throw ParseError(path, lineno, "fragment must be [text, label] or {text, label}");
      }
      const std::string norm = Lower(Trim(label));
      if (!corpus.label_set.Contains(norm)) {
        throw ParseError(path, lineno, "unknown label '" + label + "'");
      }
      p.clauses.push_back(MakeClause(Trim(text), norm));
    }
    if (p.clauses.empty()) {
      throw ParseError(path, lineno, "abstract '" + p.id + "' has no fragments");
    }
    corpus.paragraphs.push_back(std::move(p));
  }
  return corpus;
}

// ---------------------------------------------------------------- JSONL

Corpus ParseJsonl(std::string_view text, const std::optional<LabelSet>& label_set,
                  const std::string& source) {
  Corpus corpus;
  bool have_labels = false;
  if (label_set) {
    corpus.label_set = *label_set;
    have_labels = true;
  }
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (Trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(source + ":" + std::to_string(lineno) +
                            ": invalid JSON: " + e.what());
    }
    const std::string where = source + ":" + std::to_string(lineno);
    try {
      if (first && j.contains("label_set")) {
        first = false;
        LabelSet header = LabelSetFromJson(j["label_set"]);
        if (have_labels && !(header == corpus.label_set)) {
          throw ValidationError(where + ": header label set '" + header.name() +
                                "' differs from the requested '" +
                                corpus.label_set.name() + "'");
        }
        corpus.label_set = std::move(header);
        have_labels = true;
        if (j.contains("split")) corpus.split = ParseSplit(j["split"].get<std::string>());
        continue;
      }
      first = false;
      if (!have_labels) {
        throw ValidationError(where + ": no label_set header and none supplied");
      }
      Paragraph p;
      p.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
      for (const json& c : j.at("clauses")) {
        Clause clause;
        if (c.contains("text")) clause.raw_text = c["text"].get<std::string>();
        if (c.contains("tokens")) {
          clause.tokens = c["tokens"].get<std::vector<std::string>>();
        } else {
          clause.tokens = Tokenize(clause.raw_text);
        }
        if (c.contains("label") && !c["label"].is_null()) {
          clause.gold_label = c["label"].get<std::string>();
        }
        p.clauses.push_back(std::move(clause));
      }
      if (j.contains("fragment") && !j["fragment"].is_null()) {
        FragmentAnnotation fa;
        fa.referred = CodesFromJson(j["fragment"].at("referred"), where);
        fa.mentioned = CodesFromJson(j["fragment"].at("mentioned"), where);
        p.fragment = std::move(fa);
      }
      corpus.paragraphs.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (!have_labels) {
    throw ValidationError(source + ": empty corpus without a label set");
  }
  try {
    corpus.Validate();
  } catch (const Error& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return corpus;
}

Corpus ReadJsonl(const std::filesystem::path& path,
                 const std::optional<LabelSet>& label_set) {
  return ParseJsonl(ReadFile(path), label_set, path.string());
}

std::string ToJsonl(const Corpus& corpus) {
  std::string out;
  json header{{"label_set", LabelSetToJson(corpus.label_set)},
              {"split", std::string(SplitName(corpus.split))}};
  out += header.dump() + "\n";
  for (const Paragraph& p : corpus.paragraphs) {
    json jp;
    jp["id"] = p.id;
    jp["clauses"] = json::array();
    for (const Clause& c : p.clauses) {
      json jc;
      jc["tokens"] = c.tokens;
      if (!c.raw_text.empty()) jc["text"] = c.raw_text;
      jc["label"] = c.gold_label ? json(*c.gold_label) : json(nullptr);
      jp["clauses"].push_back(std::move(jc));
    }
    if (p.fragment) {
      jp["fragment"] = json{{"referred", CodesToJson(p.fragment->referred)},
                            {"mentioned", CodesToJson(p.fragment->mentioned)}};
    }
    out += jp.dump() + "\n";
  }
  return out;
}

void WriteJsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << ToJsonl(corpus);
  if (!out) throw IoError("write failed: " + path.string());
}

std::pair<Corpus, Corpus> SplitCorpus(const Corpus& corpus, double ratio,
                                      std::uint64_t seed) {
  std::vector<std::size_t> order(corpus.paragraphs.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.Shuffle(std::span<std::size_t>(order));
  std::size_t held = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(order.size())));
  if (ratio > 0 && held == 0 && order.size() >= 2) held = 1;
  if (held >= order.size() && !order.empty()) held = order.size() - 1;
  std::vector<std::size_t> first(order.begin(), order.end() - static_cast<long>(held));
  std::vector<std::size_t> second(order.end() - static_cast<long>(held), order.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  Corpus a{corpus.label_set, {}, corpus.split};
  Corpus b{corpus.label_set, {}, corpus.split};
  for (std::size_t i : first) a.paragraphs.push_back(corpus.paragraphs[i]);
  for (std::size_t i : second) b.paragraphs.push_back(corpus.paragraphs[i]);
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------- BIO

BioScheme::BioScheme(LabelSet label_set) : label_set_(std::move(label_set)) {
  const std::size_t none = label_set_.none_index();
  label_to_begin_.assign(label_set_.size(), 0);
  for (std::size_t i = 0; i < label_set_.size(); ++i) {
    if (i == none) continue;
    label_to_begin_[i] = names_.size();
    names_.push_back("B_" + label_set_.labels()[i]);
    names_.push_back("I_" + label_set_.labels()[i]);
  }
  names_.push_back("O");
  label_to_begin_[none] = names_.size() - 1;
}

std::size_t BioScheme::TagIndex(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    throw ValidationError("unknown BIO tag '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t BioScheme::LabelOf(std::size_t tag) const {
  if (tag >= names_.size()) throw ValidationError("BIO tag index out of range");
  if (tag == outside()) return label_set_.none_index();
  for (std::size_t i = 0; i < label_to_begin_.size(); ++i) {
    if (label_to_begin_[i] == (tag & ~std::size_t{1})) return i;
  }
  throw InternalError("BIO tag without label");
}

std::vector<std::size_t> BioScheme::Encode(std::span<const std::string> labels) const {
  std::vector<std::size_t> tags;
  tags.reserve(labels.size());
  const std::size_t none = label_set_.none_index();
  std::size_t prev = none;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    const std::size_t label = label_set_.IndexOf(labels[t]);
    if (label == none) {
      tags.push_back(outside());
    } else if (t > 0 && prev == label) {
      tags.push_back(label_to_begin_[label] + 1);
    } else {
      tags.push_back(label_to_begin_[label]);
    }
    prev = label;
  }
  return tags;
}

std::vector<std::string> BioScheme::Decode(std::span<const std::size_t> tags) const {
  std::vector<std::string> labels;
  labels.reserve(tags.size());
  // A stray I_x (after O or a different label) reads as B_x; either way
  // the clause label is x.
  for (std::size_t tag : tags) labels.push_back(label_set_.labels()[LabelOf(tag)]);
  return labels;
}

std::vector<std::string> EncodeBio(std::span<const std::string> labels,
                                   const LabelSet& label_set) {
  const BioScheme scheme(label_set);
  std::vector<std::string> out;
  for (std::size_t tag : scheme.Encode(labels)) out.push_back(scheme.TagName(tag));
  return out;
}

std::vector<std::string> DecodeBio(std::span<const std::string> bio,
                                   const LabelSet& label_set) {
  const BioScheme scheme(label_set);
  std::vector<std::size_t> tags;
  tags.reserve(bio.size());
  for (const std::string& name : bio) tags.push_back(scheme.TagIndex(name));
  return scheme.Decode(tags);
}

}  // namespace sdt
