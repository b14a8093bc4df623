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

#include "sdt/featcrf.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdt/crf.h"
#include "sdt/error.h"
#include "sdt/parallel.h"

namespace sdt {
namespace {

constexpr std::size_t kTags = kBlockTagCount;
// Fixed partition of the data for the gradient reduction; independent of
// the thread count so sums are reproducible.
constexpr std::size_t kReductionChunks = 32;

std::string Lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> OwnFeatures(const Clause& clause, const std::string* tag,
                                     const CodeSet& mentions) {
  std::vector<std::string> out;
  std::vector<std::string> tokens;
  tokens.reserve(clause.tokens.size());
  for (const std::string& t : clause.tokens) tokens.push_back(Lower(t));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out.push_back("uni:" + tokens[i]);
    if (i + 1 < tokens.size()) out.push_back("bi:" + tokens[i] + "_" + tokens[i + 1]);
    if (i + 2 < tokens.size()) {
      out.push_back("tri:" + tokens[i] + "_" + tokens[i + 1] + "_" + tokens[i + 2]);
    }
  }
  if (tag != nullptr) out.push_back("tag:" + *tag);
  for (const SubfigureCode& code : mentions) out.push_back("fig:" + code.ToString());
  if (!mentions.empty()) out.push_back("fig:*");
  return out;
}

const Tensor& ZeroEdge() {
  static const Tensor zero({1, kTags});
  return zero;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double ParseDouble(std::string_view text, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("featcrf model line " + std::to_string(line) + ": bad number '" +
                          std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::vector<FeatureSet> ExtractFeatures(const Paragraph& paragraph,
                                        const std::vector<std::string>* discourse_tags,
                                        std::span<const CodeSet> mentions) {
  const std::size_t n = paragraph.clauses.size();
  if (mentions.size() != n) {
    throw ValidationError("features: " + std::to_string(mentions.size()) +
                          " mention sets for " + std::to_string(n) + " clauses");
  }
  if (discourse_tags != nullptr && discourse_tags->size() != n) {
    throw ValidationError("features: " + std::to_string(discourse_tags->size()) +
                          " discourse tags for " + std::to_string(n) + " clauses");
  }
  std::vector<std::vector<std::string>> own(n);
  for (std::size_t i = 0; i < n; ++i) {
    own[i] = OwnFeatures(paragraph.clauses[i],
                         discourse_tags ? &(*discourse_tags)[i] : nullptr, mentions[i]);
  }
  std::vector<FeatureSet> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    FeatureSet& f = out[i];
    f.push_back("cur:bias");
    for (const std::string& s : own[i]) f.push_back("cur:" + s);
    if (i == 0) {
      f.push_back("prev:BOS");
    } else {
      for (const std::string& s : own[i - 1]) f.push_back("prev:" + s);
    }
    if (i + 1 == n) {
      f.push_back("next:EOS");
    } else {
      for (const std::string& s : own[i + 1]) f.push_back("next:" + s);
    }
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
  }
  return out;
}

std::vector<CodeSet> ClauseMentions(const Paragraph& paragraph) {
  if (paragraph.fragment) return paragraph.fragment->mentioned;
  std::vector<CodeSet> out;
  out.reserve(paragraph.clauses.size());
  for (const Clause& c : paragraph.clauses) {
    if (!c.raw_text.empty()) {
      out.push_back(ExtractMentions(c.raw_text));
    } else {
      std::string joined;
      for (const std::string& t : c.tokens) joined += (joined.empty() ? "" : " ") + t;
      out.push_back(ExtractMentions(joined));
    }
  }
  return out;
}

// ---------------------------------------------------------------- model

std::size_t FeatCrfModel::FeatureIndex(const std::string& feature) const {
  const auto it = std::lower_bound(features.begin(), features.end(), feature);
  if (it == features.end() || *it != feature) return std::string::npos;
  return static_cast<std::size_t>(it - features.begin());
}

Tensor FeatCrfModel::Emissions(const std::vector<FeatureSet>& sequence) const {
  Tensor e = Tensor::Zeros(sequence.size(), kTags);
  for (std::size_t t = 0; t < sequence.size(); ++t) {
    for (const std::string& f : sequence[t]) {
      const std::size_t k = FeatureIndex(f);
      if (k == std::string::npos) continue;
      for (std::size_t y = 0; y < kTags; ++y) e(t, y) += weights(k, y);
    }
  }
  return e;
}

std::string FeatCrfModel::ToText() const {
  std::ostringstream out;
  out << "featcrf\t1\nl2\t" << FormatDouble(l2) << "\n";
  for (std::size_t a = 0; a < kTags; ++a) {
    for (std::size_t b = 0; b < kTags; ++b) {
      out << "transition\t" << BlockTagChar(static_cast<BlockTag>(a)) << '\t'
          << BlockTagChar(static_cast<BlockTag>(b)) << '\t' << FormatDouble(transitions(a, b))
          << '\n';
    }
  }
  for (std::size_t k = 0; k < features.size(); ++k) {
    for (std::size_t y = 0; y < kTags; ++y) {
      if (weights(k, y) == 0.0) continue;
      out << "weight\t" << features[k] << '\t' << BlockTagChar(static_cast<BlockTag>(y)) << '\t'
          << FormatDouble(weights(k, y)) << '\n';
    }
  }
  return out.str();
}

FeatCrfModel FeatCrfModel::FromText(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  };
  if (!next() || line != "featcrf\t1") throw ValidationError("featcrf model: bad header");
  FeatCrfModel m;
  m.transitions = Tensor::Zeros(kTags, kTags);
  std::vector<std::tuple<std::string, std::size_t, double>> rows;
  while (next()) {
    if (line.empty()) continue;
    const std::vector<std::string> cols = SplitTabs(line);
    if (cols[0] == "l2" && cols.size() == 2) {
      m.l2 = ParseDouble(cols[1], line_no);
    } else if (cols[0] == "transition" && cols.size() == 4) {
      const auto a = static_cast<std::size_t>(ParseBlockTag(cols[1]));
      const auto b = static_cast<std::size_t>(ParseBlockTag(cols[2]));
      m.transitions(a, b) = ParseDouble(cols[3], line_no);
    } else if (cols[0] == "weight" && cols.size() == 4) {
      rows.emplace_back(cols[1], static_cast<std::size_t>(ParseBlockTag(cols[2])),
                        ParseDouble(cols[3], line_no));
    } else {
      throw ValidationError("featcrf model line " + std::to_string(line_no) + ": malformed");
    }
  }
  for (const auto& row : rows) m.features.push_back(std::get<0>(row));
  std::sort(m.features.begin(), m.features.end());
  m.features.erase(std::unique(m.features.begin(), m.features.end()), m.features.end());
  m.weights = Tensor::Zeros(m.features.size(), kTags);
  for (const auto& [f, y, w] : rows) m.weights(m.FeatureIndex(f), y) = w;
  return m;
}

void FeatCrfModel::Save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << ToText();
  if (!out) throw IoError("write failed: " + path.string());
}

FeatCrfModel FeatCrfModel::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return FromText(buf.str());
}

// ---------------------------------------------------------------- training

FeatCrfObjective::FeatCrfObjective(std::span<const FeatSequence> data,
                                   std::vector<std::string> dictionary, double l2)
    : dictionary_(std::move(dictionary)), l2_(l2) {
  if (!std::is_sorted(dictionary_.begin(), dictionary_.end())) {
    throw InternalError("featcrf: dictionary must be sorted");
  }
  for (const FeatSequence& seq : data) {
    if (seq.features.size() != seq.tags.size() || seq.features.empty()) {
      throw ValidationError("featcrf: sequence features and tags must align and be non-empty");
    }
    std::vector<std::vector<std::uint32_t>> clauses;
    for (const FeatureSet& fs : seq.features) {
      std::vector<std::uint32_t> idx;
      for (const std::string& f : fs) {
        const auto it = std::lower_bound(dictionary_.begin(), dictionary_.end(), f);
        if (it != dictionary_.end() && *it == f) {
          idx.push_back(static_cast<std::uint32_t>(it - dictionary_.begin()));
        }
      }
      clauses.push_back(std::move(idx));
    }
    indexed_.push_back(std::move(clauses));
    std::vector<std::size_t> gold;
    for (BlockTag t : seq.tags) gold.push_back(static_cast<std::size_t>(t));
    gold_.push_back(std::move(gold));
  }
}

double FeatCrfObjective::Evaluate(std::span<const double> theta, std::span<double> grad,
                                  bool penalize) const {
  const std::size_t nf = dictionary_.size();
  if (theta.size() != dimension()) throw InternalError("featcrf: parameter size");
  Tensor transitions = Tensor::Zeros(kTags, kTags);
  for (std::size_t i = 0; i < kTags * kTags; ++i) transitions[i] = theta[nf * kTags + i];
  const CrfWeights w{transitions, ZeroEdge(), ZeroEdge()};

  const std::size_t chunks = std::min(kReductionChunks, std::max<std::size_t>(indexed_.size(), 1));
  std::vector<double> chunk_value(chunks, 0.0);
  std::vector<std::vector<double>> chunk_grad(
      grad.empty() ? 0 : chunks, std::vector<double>(theta.size(), 0.0));
  ParallelFor(chunks, [&](std::size_t c) {
    const std::size_t begin = indexed_.size() * c / chunks;
    const std::size_t end = indexed_.size() * (c + 1) / chunks;
    for (std::size_t s = begin; s < end; ++s) {
      const auto& seq = indexed_[s];
      Tensor e = Tensor::Zeros(seq.size(), kTags);
      for (std::size_t t = 0; t < seq.size(); ++t) {
        for (std::uint32_t k : seq[t]) {
          for (std::size_t y = 0; y < kTags; ++y) e(t, y) += theta[k * kTags + y];
        }
      }
      if (grad.empty()) {
        chunk_value[c] += CrfNll(e, w, gold_[s]);
        continue;
      }
      double nll = 0.0;
      const CrfGradients g = CrfNllGradient(e, w, gold_[s], {}, &nll);
      chunk_value[c] += nll;
      std::vector<double>& out = chunk_grad[c];
      for (std::size_t t = 0; t < seq.size(); ++t) {
        for (std::uint32_t k : seq[t]) {
          for (std::size_t y = 0; y < kTags; ++y) out[k * kTags + y] += g.emissions(t, y);
        }
      }
      for (std::size_t i = 0; i < kTags * kTags; ++i) out[nf * kTags + i] += g.transitions[i];
    }
  });

  double value = 0.0;
  for (double v : chunk_value) value += v;
  if (!grad.empty()) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& cg : chunk_grad) {
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += cg[i];
    }
  }
  if (penalize && l2_ != 0.0) {
    double sq = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
      sq += theta[i] * theta[i];
      if (!grad.empty()) grad[i] += l2_ * theta[i];
    }
    value += 0.5 * l2_ * sq;
  }
  return value;
}

double FeatCrfObjective::operator()(std::span<const double> theta, std::span<double> grad) const {
  return Evaluate(theta, grad, true);
}

double FeatCrfObjective::LogLikelihood(std::span<const double> theta) const {
  return -Evaluate(theta, {}, false);
}

FeatCrfTraining TrainFeatCrf(std::span<const FeatSequence> data, double l2,
                             const LbfgsOptions& options) {
  if (data.empty()) throw ValidationError("featcrf: empty training set");
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw ValidationError("featcrf: l2 must be >= 0");
  std::vector<std::string> dictionary;
  for (const FeatSequence& seq : data) {
    for (const FeatureSet& fs : seq.features) dictionary.insert(dictionary.end(), fs.begin(), fs.end());
  }
  std::sort(dictionary.begin(), dictionary.end());
  dictionary.erase(std::unique(dictionary.begin(), dictionary.end()), dictionary.end());

  const FeatCrfObjective objective(data, dictionary, l2);
  std::vector<double> theta(objective.dimension(), 0.0);
  FeatCrfTraining out;
  out.optimizer = MinimizeLbfgs(
      [&](std::span<const double> x, std::span<double> g) { return objective(x, g); }, theta,
      options);
  FeatCrfModel& m = out.model;
  m.l2 = l2;
  m.features = std::move(dictionary);
  m.weights = Tensor::Zeros(m.features.size(), kTags);
  for (std::size_t i = 0; i < m.features.size() * kTags; ++i) m.weights[i] = theta[i];
  m.transitions = Tensor::Zeros(kTags, kTags);
  for (std::size_t i = 0; i < kTags * kTags; ++i) {
    m.transitions[i] = theta[m.features.size() * kTags + i];
  }
  return out;
}

std::vector<BlockTag> DecodeFeatCrf(const std::vector<FeatureSet>& features,
                                    const FeatCrfModel& model) {
  if (features.empty()) return {};
  const Tensor e = model.Emissions(features);
  const CrfWeights w{model.transitions, ZeroEdge(), ZeroEdge()};
  std::vector<BlockTag> out;
  for (std::size_t t : Viterbi(e, w)) out.push_back(static_cast<BlockTag>(t));
  return out;
}

// ---------------------------------------------------------------- pipeline

namespace {

const std::vector<std::string>* TagsFor(std::span<const std::vector<std::string>> tags,
                                        std::size_t i, std::size_t paragraphs) {
  if (tags.empty()) return nullptr;
  if (tags.size() != paragraphs) {
    throw ValidationError("fragments: " + std::to_string(tags.size()) +
                          " tag sequences for " + std::to_string(paragraphs) + " paragraphs");
  }
  return &tags[i];
}

const FragmentAnnotation& RequireFragment(const Paragraph& p) {
  if (!p.fragment) throw ValidationError("paragraph " + p.id + " has no fragment annotation");
  return *p.fragment;
}

}  // namespace

std::vector<FeatSequence> FragmentSequences(const Corpus& corpus,
                                            std::span<const std::vector<std::string>> tags) {
  std::vector<FeatSequence> out;
  for (std::size_t i = 0; i < corpus.paragraphs.size(); ++i) {
    const Paragraph& p = corpus.paragraphs[i];
    const FragmentAnnotation& f = RequireFragment(p);
    const std::vector<CodeSet> mentions = ClauseMentions(p);
    out.push_back({ExtractFeatures(p, TagsFor(tags, i, corpus.paragraphs.size()), mentions),
                   EncodeBlocks(f.referred)});
  }
  return out;
}

std::vector<CodeSet> PredictFragments(const Paragraph& paragraph,
                                      const std::vector<std::string>* tags,
                                      const FeatCrfModel& model) {
  const std::vector<CodeSet> mentions = ClauseMentions(paragraph);
  const std::vector<BlockTag> bio =
      DecodeFeatCrf(ExtractFeatures(paragraph, tags, mentions), model);
  return DecodeBlocks(bio, mentions);
}

FragmentScore EvaluateFragments(const Corpus& corpus,
                                std::span<const std::vector<std::string>> tags,
                                const FeatCrfModel& model) {
  std::vector<std::vector<CodeSet>> predictions(corpus.paragraphs.size());
  for (const Paragraph& p : corpus.paragraphs) RequireFragment(p);
  ParallelFor(corpus.paragraphs.size(), [&](std::size_t i) {
    predictions[i] = PredictFragments(corpus.paragraphs[i],
                                      TagsFor(tags, i, corpus.paragraphs.size()), model);
  });
  FragmentScore score;
  for (std::size_t i = 0; i < corpus.paragraphs.size(); ++i) {
    score.Add(predictions[i], corpus.paragraphs[i].fragment->referred);
  }
  return score;
}

FragmentScore GoldBlockFragments(const Corpus& corpus) {
  FragmentScore score;
  for (const Paragraph& p : corpus.paragraphs) {
    const FragmentAnnotation& f = RequireFragment(p);
    const std::vector<BlockTag> bio = EncodeBlocks(f.referred);
    score.Add(DecodeBlocks(bio, ClauseMentions(p)), f.referred);
  }
  return score;
}

}  // namespace sdt
