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

#ifndef SDT_METRICS_H_
#define SDT_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdt/corpus.h"

namespace sdt {

using LabelSequence = std::vector<std::string>;

// Micro F1 over single-label items; equals accuracy. Sequences are
// flattened; every pair must have equal length.
double MicroF1(std::span<const LabelSequence> pred,
               std::span<const LabelSequence> gold);
double MicroF1(std::span<const std::string> pred,
               std::span<const std::string> gold);

// Micro F1 over the non-none classes only: a none prediction or a none gold
// item is neither a true nor a false positive for the none class.
double MicroF1ExcludingNone(std::span<const std::string> pred,
                            std::span<const std::string> gold,
                            const std::string& none_label);

// F1 of the positive class (1). Zero when precision + recall is zero.
double BinaryF1(std::span<const int> pred, std::span<const int> gold);

// (p_o - p_e) / (1 - p_e); 1 when p_e = 1 and a == b.
double CohenKappa(std::span<const std::string> a, std::span<const std::string> b);

struct McNemarResult {
  std::size_t a_only = 0;  // a correct, b wrong
  std::size_t b_only = 0;  // a wrong, b correct
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = false;
};

// Continuity-corrected chi-square (1 dof) by default. With exact_small_sample
// and fewer than 25 discordant pairs, the two-sided exact binomial test.
McNemarResult McNemar(std::span<const std::string> pred_a,
                      std::span<const std::string> pred_b,
                      std::span<const std::string> gold,
                      bool exact_small_sample = false);
McNemarResult McNemarFromCounts(std::size_t a_only, std::size_t b_only,
                                bool exact_small_sample = false);

// Upper tail of the chi-square distribution with one degree of freedom.
double ChiSquare1Survival(double x);

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<std::int64_t>> counts;  // [gold][pred]

  std::int64_t total() const;
  std::vector<std::vector<double>> RowNormalized() const;
  std::string ToTsv() const;
};

ConfusionMatrix Confusion(std::span<const std::string> pred,
                          std::span<const std::string> gold,
                          const LabelSet& label_set);

std::vector<std::string> Flatten(std::span<const LabelSequence> seqs);

}  // namespace sdt

#endif  // SDT_METRICS_H_
