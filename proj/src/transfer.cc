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

#include "sdt/transfer.h"

#include "sdt/error.h"
#include "sdt/metrics.h"

namespace sdt {

const std::string& LabelMap::Map(const std::string& source_label) const {
  const auto it = mapping.find(source_label);
  if (it == mapping.end()) throw ValidationError("label map has no entry for '" + source_label + "'");
  return it->second;
}

std::vector<std::string> LabelMap::Map(std::span<const std::string> labels) const {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const std::string& l : labels) out.push_back(Map(l));
  return out;
}

nlohmann::json LabelMap::ToJson() const {
  nlohmann::json rows = nlohmann::json::object();
  for (std::size_t s = 0; s < source.size(); ++s) {
    nlohmann::json row = nlohmann::json::object();
    for (std::size_t t = 0; t < target.size(); ++t) row[target.labels()[t]] = contingency[s][t];
    rows[source.labels()[s]] = row;
  }
  return {{"source_label_set", source.name()},
          {"target_label_set", target.name()},
          {"mapping", mapping},
          {"contingency", rows},
          {"degenerate", degenerate},
          {"tie_rule", "target frequency, then lexicographic"}};
}

LabelMap LabelMapFromPredictions(const LabelSet& source, const LabelSet& target,
                                 std::span<const std::vector<std::string>> predicted,
                                 std::span<const std::vector<std::string>> gold) {
  if (predicted.size() != gold.size()) {
    throw ValidationError("label map: prediction/gold paragraph counts differ");
  }
  LabelMap map;
  map.source = source;
  map.target = target;
  map.contingency.assign(source.size(), std::vector<std::size_t>(target.size(), 0));
  std::vector<std::size_t> target_total(target.size(), 0);
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    if (predicted[p].size() != gold[p].size()) {
      throw ValidationError("label map: prediction/gold lengths differ in paragraph " +
                            std::to_string(p));
    }
    for (std::size_t i = 0; i < gold[p].size(); ++i) {
      const std::size_t t = target.IndexOf(gold[p][i]);
      ++map.contingency[source.IndexOf(predicted[p][i])][t];
      ++target_total[t];
    }
  }
  for (std::size_t s = 0; s < source.size(); ++s) {
    const auto& row = map.contingency[s];
    std::size_t row_total = 0;
    for (std::size_t c : row) row_total += c;
    if (row_total == 0) {
      map.mapping[source.labels()[s]] = target.none_label();
      map.degenerate.push_back(source.labels()[s]);
      continue;
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < target.size(); ++t) {
      const auto key = [&](std::size_t k) {
        return std::make_tuple(row[k], target_total[k]);
      };
      if (key(t) > key(best) ||
          (key(t) == key(best) && target.labels()[t] < target.labels()[best])) {
        best = t;
      }
    }
    map.mapping[source.labels()[s]] = target.labels()[best];
  }
  return map;
}

LabelMap LearnLabelMap(const TaggerModel& source_model, const Corpus& target_train,
                       const EmbeddingStore& store) {
  std::vector<std::vector<std::string>> gold;
  for (const Paragraph& p : target_train.paragraphs) gold.push_back(p.GoldLabels());
  const auto predicted = TagCorpus(target_train, store, source_model);
  return LabelMapFromPredictions(source_model.label_set, target_train.label_set, predicted, gold);
}

ZeroShotResult ZeroShotEval(const TaggerModel& source_model, const LabelMap& map,
                            const Corpus& target_test, const EmbeddingStore& store) {
  if (!(map.source == source_model.label_set)) {
    throw ValidationError("label map source set does not match the model");
  }
  ZeroShotResult out;
  std::vector<std::vector<std::string>> gold;
  for (const Paragraph& p : target_test.paragraphs) gold.push_back(p.GoldLabels());
  for (const auto& seq : TagCorpus(target_test, store, source_model)) {
    out.predictions.push_back(map.Map(seq));
  }
  out.micro_f1 = MicroF1(out.predictions, gold);
  return out;
}

TrainResult FineTune(const TaggerModel& pretrained, const Corpus& target,
                     const EmbeddingStore& store, const TaggerConfig& config,
                     const TrainOptions& options) {
  if (pretrained.config.d != config.d || pretrained.config.p != config.p ||
      pretrained.config.h != config.h || pretrained.config.d2 != config.d2 ||
      pretrained.config.H != config.H) {
    throw ValidationError("fine-tune config dimensions differ from the pretrained model");
  }
  const TaggerModel swapped = SwapHead(pretrained, target.label_set, config.seed);
  return Train(target, store, config, &swapped, options);
}

}  // namespace sdt
