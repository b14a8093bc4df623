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

#ifndef SDT_CRF_H_
#define SDT_CRF_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sdt/tape.h"
#include "sdt/tensor.h"

namespace sdt {

// Linear-chain CRF scores over K tags: transitions[i][j] scores tag i
// followed by tag j; start/end are 1 x K.
struct CrfWeights {
  const Tensor& transitions;
  const Tensor& start;
  const Tensor& end;
};

// Mask entries are nonzero for positions that take part in the chain; an
// empty mask means every position does. Masked positions are skipped (the
// chain links the surrounding unmasked positions directly).
using StepMask = std::span<const std::uint8_t>;

inline constexpr std::size_t kMaskedTag = std::numeric_limits<std::size_t>::max();

// log sum over all tag paths of exp(path score), by the forward recursion.
double CrfLogPartition(const Tensor& emissions, const CrfWeights& w,
                       StepMask mask = {});

// start[y1] + sum emissions[t][yt] + sum transitions[yt][yt+1] + end[yn].
double CrfPathScore(const Tensor& emissions, const CrfWeights& w,
                    std::span<const std::size_t> tags, StepMask mask = {});

double CrfNll(const Tensor& emissions, const CrfWeights& w,
              std::span<const std::size_t> gold, StepMask mask = {});

struct CrfGradients {
  Tensor emissions;
  Tensor transitions;
  Tensor start;
  Tensor end;
};

// Gradient of CrfNll from forward-backward marginals.
CrfGradients CrfNllGradient(const Tensor& emissions, const CrfWeights& w,
                            std::span<const std::size_t> gold, StepMask mask,
                            double* nll = nullptr);

// Highest-scoring path; ties go to the lowest tag index at every backtrack
// step. Masked positions hold kMaskedTag.
std::vector<std::size_t> Viterbi(const Tensor& emissions, const CrfWeights& w,
                                 StepMask mask = {}, double* best_score = nullptr);

// NLL as a tape node over (emissions n x K, transitions K x K, start, end).
Var CrfNllNode(Var emissions, Var transitions, Var start, Var end,
               std::vector<std::size_t> gold, std::vector<std::uint8_t> mask);

}  // namespace sdt

#endif  // SDT_CRF_H_
