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

#ifndef SDT_TRANSFER_H_
#define SDT_TRANSFER_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sdt/corpus.h"
#include "sdt/embeddings.h"
#include "sdt/tagger.h"
#include "sdt/train.h"

namespace sdt {

// Majority-vote translation from a source label set to a target label set.
struct LabelMap {
  LabelSet source;
  LabelSet target;
  std::map<std::string, std::string> mapping;
  // contingency[s][t]: clauses predicted as source label s with gold target t.
  std::vector<std::vector<std::size_t>> contingency;
  std::vector<std::string> degenerate;  // source labels never predicted

  const std::string& Map(const std::string& source_label) const;
  std::vector<std::string> Map(std::span<const std::string> labels) const;
  nlohmann::json ToJson() const;
};

// Ties in a row go to the target label that is more frequent in `gold`
// overall, then to the lexicographically smaller one. Rows with no
// predictions map to the target none label.
LabelMap LabelMapFromPredictions(const LabelSet& source, const LabelSet& target,
                                 std::span<const std::vector<std::string>> predicted,
                                 std::span<const std::vector<std::string>> gold);

LabelMap LearnLabelMap(const TaggerModel& source_model, const Corpus& target_train,
                       const EmbeddingStore& store);

struct ZeroShotResult {
  double micro_f1 = 0.0;
  std::vector<std::vector<std::string>> predictions;  // mapped to the target set
};

ZeroShotResult ZeroShotEval(const TaggerModel& source_model, const LabelMap& map,
                            const Corpus& target_test, const EmbeddingStore& store);

// Head swap to the target label set followed by training with a fresh
// optimizer.
TrainResult FineTune(const TaggerModel& pretrained, const Corpus& target,
                     const EmbeddingStore& store, const TaggerConfig& config,
                     const TrainOptions& options = {});

}  // namespace sdt

#endif  // SDT_TRANSFER_H_
