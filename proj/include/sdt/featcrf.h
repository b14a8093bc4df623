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

#ifndef SDT_FEATCRF_H_
#define SDT_FEATCRF_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sdt/corpus.h"
#include "sdt/fragments.h"
#include "sdt/lbfgs.h"
#include "sdt/tensor.h"

namespace sdt {

// Sorted, duplicate-free feature strings of one clause.
using FeatureSet = std::vector<std::string>;

// Features of clause i: its own word n-grams ("uni:", "bi:", "tri:"),
// discourse tag ("tag:"), mention codes ("fig:1A") and a has-mention flag
// ("fig:*"), each under "cur:"; the same features of clauses i-1 and i+1
// under "prev:" and "next:", or the sentinels "prev:BOS" / "next:EOS" at
// the paragraph edges; and a constant "cur:bias".
// `discourse_tags` may be null (no tag features); otherwise it and
// `mentions` must have one entry per clause.
std::vector<FeatureSet> ExtractFeatures(const Paragraph& paragraph,
                                        const std::vector<std::string>* discourse_tags,
                                        std::span<const CodeSet> mentions);

// Explicit mentions per clause: the annotated ones when the paragraph has a
// fragment annotation, otherwise extracted from the clause text (or the
// joined tokens when the text is empty).
std::vector<CodeSet> ClauseMentions(const Paragraph& paragraph);

struct FeatSequence {
  std::vector<FeatureSet> features;
  std::vector<BlockTag> tags;
};

struct FeatCrfModel {
  std::vector<std::string> features;  // sorted dictionary
  Tensor weights;                     // features x 3 (B, I, O)
  Tensor transitions;                 // 3 x 3
  double l2 = 1.0;

  std::size_t FeatureIndex(const std::string& feature) const;  // npos if absent
  Tensor Emissions(const std::vector<FeatureSet>& sequence) const;  // n x 3

  // Sorted "feature<TAB>tag<TAB>weight" rows for nonzero weights, then the
  // transition table.
  std::string ToText() const;
  static FeatCrfModel FromText(const std::string& text);
  void Save(const std::filesystem::path& path) const;
  static FeatCrfModel Load(const std::filesystem::path& path);
};

struct FeatCrfTraining {
  FeatCrfModel model;
  LbfgsResult optimizer;
};

// Builds the dictionary from the training features and minimizes the
// L2-penalized negative conditional log-likelihood with L-BFGS.
FeatCrfTraining TrainFeatCrf(std::span<const FeatSequence> data, double l2,
                             const LbfgsOptions& options = {});

// Penalized negative log-likelihood and its gradient over a flat parameter
// vector (feature weights row-major, then transitions).
class FeatCrfObjective {
 public:
  FeatCrfObjective(std::span<const FeatSequence> data, std::vector<std::string> dictionary,
                   double l2);
  std::size_t dimension() const { return (dictionary_.size() + 3) * 3; }
  double operator()(std::span<const double> theta, std::span<double> grad) const;
  // Unpenalized log-likelihood of the data.
  double LogLikelihood(std::span<const double> theta) const;
  const std::vector<std::string>& dictionary() const { return dictionary_; }

 private:
  double Evaluate(std::span<const double> theta, std::span<double> grad, bool penalize) const;

  std::vector<std::string> dictionary_;
  std::vector<std::vector<std::vector<std::uint32_t>>> indexed_;  // seq, clause, features
  std::vector<std::vector<std::size_t>> gold_;
  double l2_;
};

std::vector<BlockTag> DecodeFeatCrf(const std::vector<FeatureSet>& features,
                                    const FeatCrfModel& model);

// Fragment pipeline over a corpus. `tags` is empty (no discourse features)
// or holds one discourse-label sequence per paragraph.
std::vector<FeatSequence> FragmentSequences(const Corpus& corpus,
                                            std::span<const std::vector<std::string>> tags);
std::vector<CodeSet> PredictFragments(const Paragraph& paragraph,
                                      const std::vector<std::string>* tags,
                                      const FeatCrfModel& model);
FragmentScore EvaluateFragments(const Corpus& corpus,
                                std::span<const std::vector<std::string>> tags,
                                const FeatCrfModel& model);
// Decoding with gold block tags: the ceiling of the block reduction.
FragmentScore GoldBlockFragments(const Corpus& corpus);

}  // namespace sdt

#endif  // SDT_FEATCRF_H_
