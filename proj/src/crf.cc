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

#include "sdt/crf.h"

#include <cmath>
#include <memory>

#include "sdt/error.h"
#include "sdt/ops.h"

namespace sdt {
namespace {

std::vector<std::size_t> ActiveSteps(std::size_t n, StepMask mask) {
  if (!mask.empty() && mask.size() != n) {
    throw ValidationError("crf mask length " + std::to_string(mask.size()) +
                          " differs from " + std::to_string(n) + " steps");
  }
  std::vector<std::size_t> steps;
  for (std::size_t t = 0; t < n; ++t) {
    if (mask.empty() || mask[t] != 0) steps.push_back(t);
  }
  if (steps.empty()) throw ValidationError("crf needs at least one unmasked step");
  return steps;
}

std::size_t CheckShapes(const Tensor& emissions, const CrfWeights& w) {
  if (emissions.rank() != 2 || emissions.cols() == 0) {
    throw ValidationError("crf emissions must be n x K, got " +
                          ShapeString(emissions.shape()));
  }
  const std::size_t k = emissions.cols();
  if (w.transitions.shape() != Shape{k, k} || w.start.shape() != Shape{1, k} ||
      w.end.shape() != Shape{1, k}) {
    throw ValidationError("crf weights do not match K=" + std::to_string(k));
  }
  return k;
}

// alpha[s][j] for active step s.
std::vector<std::vector<double>> Forward(const Tensor& e, const CrfWeights& w,
                                         const std::vector<std::size_t>& steps,
                                         std::size_t k) {
  std::vector<std::vector<double>> alpha(steps.size(), std::vector<double>(k));
  for (std::size_t j = 0; j < k; ++j) alpha[0][j] = w.start[j] + e(steps[0], j);
  std::vector<double> scratch(k);
  for (std::size_t s = 1; s < steps.size(); ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < k; ++i) scratch[i] = alpha[s - 1][i] + w.transitions(i, j);
      alpha[s][j] = LogSumExp(scratch) + e(steps[s], j);
    }
  }
  return alpha;
}

double Finish(const std::vector<double>& last, const CrfWeights& w) {
  std::vector<double> scratch(last.size());
  for (std::size_t j = 0; j < last.size(); ++j) scratch[j] = last[j] + w.end[j];
  return LogSumExp(scratch);
}

void CheckGold(std::span<const std::size_t> gold, std::size_t n, std::size_t k,
               const std::vector<std::size_t>& steps) {
  if (gold.size() != n) {
    throw ValidationError("crf gold length " + std::to_string(gold.size()) +
                          " differs from " + std::to_string(n) + " steps");
  }
  for (std::size_t t : steps) {
    if (gold[t] >= k) {
      throw ValidationError("crf gold tag " + std::to_string(gold[t]) +
                            " out of range for K=" + std::to_string(k));
    }
  }
}

}  // namespace

double CrfLogPartition(const Tensor& emissions, const CrfWeights& w, StepMask mask) {
  const std::size_t k = CheckShapes(emissions, w);
  const std::vector<std::size_t> steps = ActiveSteps(emissions.rows(), mask);
  return Finish(Forward(emissions, w, steps, k).back(), w);
}

double CrfPathScore(const Tensor& emissions, const CrfWeights& w,
                    std::span<const std::size_t> tags, StepMask mask) {
  const std::size_t k = CheckShapes(emissions, w);
  const std::vector<std::size_t> steps = ActiveSteps(emissions.rows(), mask);
  CheckGold(tags, emissions.rows(), k, steps);
  double score = w.start[tags[steps.front()]] + w.end[tags[steps.back()]];
  for (std::size_t s = 0; s < steps.size(); ++s) {
    score += emissions(steps[s], tags[steps[s]]);
    if (s > 0) score += w.transitions(tags[steps[s - 1]], tags[steps[s]]);
  }
  return score;
}

double CrfNll(const Tensor& emissions, const CrfWeights& w,
              std::span<const std::size_t> gold, StepMask mask) {
  return CrfLogPartition(emissions, w, mask) - CrfPathScore(emissions, w, gold, mask);
}

CrfGradients CrfNllGradient(const Tensor& emissions, const CrfWeights& w,
                            std::span<const std::size_t> gold, StepMask mask,
                            double* nll) {
  const std::size_t k = CheckShapes(emissions, w);
  const std::vector<std::size_t> steps = ActiveSteps(emissions.rows(), mask);
  CheckGold(gold, emissions.rows(), k, steps);
  const std::size_t m = steps.size();
  const auto alpha = Forward(emissions, w, steps, k);
  const double log_z = Finish(alpha.back(), w);

  std::vector<std::vector<double>> beta(m, std::vector<double>(k));
  for (std::size_t j = 0; j < k; ++j) beta[m - 1][j] = w.end[j];
  std::vector<double> scratch(k);
  for (std::size_t s = m - 1; s-- > 0;) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        scratch[j] = w.transitions(i, j) + emissions(steps[s + 1], j) + beta[s + 1][j];
      }
      beta[s][i] = LogSumExp(scratch);
    }
  }

  CrfGradients g{Tensor(emissions.shape()), Tensor({k, k}), Tensor({1, k}),
                 Tensor({1, k})};
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      const double p = std::exp(alpha[s][j] + beta[s][j] - log_z);
      g.emissions(steps[s], j) += p;
      if (s == 0) g.start[j] += p;
      if (s == m - 1) g.end[j] += p;
    }
    if (s + 1 < m) {
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          g.transitions(i, j) += std::exp(alpha[s][i] + w.transitions(i, j) +
                                          emissions(steps[s + 1], j) +
                                          beta[s + 1][j] - log_z);
        }
      }
    }
  }
  double gold_score = w.start[gold[steps.front()]] + w.end[gold[steps.back()]];
  g.start[gold[steps.front()]] -= 1.0;
  g.end[gold[steps.back()]] -= 1.0;
  for (std::size_t s = 0; s < m; ++s) {
    const std::size_t t = steps[s];
    g.emissions(t, gold[t]) -= 1.0;
    gold_score += emissions(t, gold[t]);
    if (s > 0) {
      g.transitions(gold[steps[s - 1]], gold[t]) -= 1.0;
      gold_score += w.transitions(gold[steps[s - 1]], gold[t]);
    }
  }
  if (nll != nullptr) *nll = log_z - gold_score;
  return g;
}

std::vector<std::size_t> Viterbi(const Tensor& emissions, const CrfWeights& w,
                                 StepMask mask, double* best_score) {
  const std::size_t k = CheckShapes(emissions, w);
  const std::vector<std::size_t> steps = ActiveSteps(emissions.rows(), mask);
  const std::size_t m = steps.size();
  std::vector<double> delta(k), next(k);
  std::vector<std::vector<std::size_t>> back(m, std::vector<std::size_t>(k, 0));
  for (std::size_t j = 0; j < k; ++j) delta[j] = w.start[j] + emissions(steps[0], j);
  for (std::size_t s = 1; s < m; ++s) {
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t best_i = 0;
      double best = delta[0] + w.transitions(0, j);
      for (std::size_t i = 1; i < k; ++i) {
        const double v = delta[i] + w.transitions(i, j);
        if (v > best) {
          best = v;
          best_i = i;
        }
      }
      next[j] = best + emissions(steps[s], j);
      back[s][j] = best_i;
    }
    delta.swap(next);
  }
  std::size_t tag = 0;
  double best = delta[0] + w.end[0];
  for (std::size_t j = 1; j < k; ++j) {
    if (delta[j] + w.end[j] > best) {
      best = delta[j] + w.end[j];
      tag = j;
    }
  }
  if (best_score != nullptr) *best_score = best;
  std::vector<std::size_t> path(emissions.rows(), kMaskedTag);
  for (std::size_t s = m; s-- > 0;) {
    path[steps[s]] = tag;
    tag = back[s][tag];
  }
  return path;
}

Var CrfNllNode(Var emissions, Var transitions, Var start, Var end,
               std::vector<std::size_t> gold, std::vector<std::uint8_t> mask) {
  const CrfWeights w{transitions.value(), start.value(), end.value()};
  double nll = 0.0;
  CrfGradients grads = CrfNllGradient(emissions.value(), w, gold, mask, &nll);
  auto shared = std::make_shared<CrfGradients>(std::move(grads));
  return emissions.tape()->Record(
      Tensor::Scalar(nll), {emissions, transitions, start, end},
      [shared](BackwardContext& c) {
        const double g = c.output_grad()[0];
        const Tensor* parts[] = {&shared->emissions, &shared->transitions,
                                 &shared->start, &shared->end};
        for (std::size_t k = 0; k < 4; ++k) {
          if (!c.needs_grad(k)) continue;
          Tensor& dst = c.input_grad(k);
          for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += g * (*parts[k])[i];
        }
      });
}

}  // namespace sdt
