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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "sdt/crf.h"
#include "sdt/error.h"
#include "sdt/grad_check.h"
#include "test_util.h"

namespace sdt {
namespace {

using testing::BruteLogPartition;
using testing::BruteMax;
using testing::ForEachPath;
using testing::NaivePathScore;
using testing::RandomTensor;

struct Instance {
  Tensor e, trans, start, end;
  CrfWeights weights() const { return {trans, start, end}; }
};

Instance RandomInstance(Rng& rng, std::size_t n, std::size_t k, double scale = 2.0) {
  return {RandomTensor({n, k}, rng, scale), RandomTensor({k, k}, rng, scale),
          RandomTensor({1, k}, rng, scale), RandomTensor({1, k}, rng, scale)};
}

TEST(CrfTest, PartitionMatchesEnumeration) {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.Index(6);
    const std::size_t k = 1 + rng.Index(5);
    const Instance in = RandomInstance(rng, n, k);
    const double z = CrfLogPartition(in.e, in.weights());
    const double ref = BruteLogPartition(in.e, in.trans, in.start, in.end);
    EXPECT_LE(std::abs(z - ref), 1e-9 * std::max(1.0, std::abs(ref))) << n << "x" << k;
  }
}

TEST(CrfTest, PartitionClosedForms) {
  const Tensor zero1({1, 1});
  const Tensor zero11({1, 1});
  EXPECT_EQ(CrfLogPartition(Tensor({4, 1}), {zero11, zero1, zero1}), 0.0);
  const Tensor e = Tensor::Row({0.3, -1.2});
  const Tensor t({2, 2}), s({1, 2});
  EXPECT_NEAR(CrfLogPartition(e, {t, s, s}), std::log(std::exp(0.3) + std::exp(-1.2)), 1e-15);
}

TEST(CrfTest, PartitionBoundsEveryPath) {
  Rng rng(102);
  const Instance in = RandomInstance(rng, 4, 3);
  const double z = CrfLogPartition(in.e, in.weights());
  ForEachPath(4, 3, [&](const std::vector<std::size_t>& p) {
    EXPECT_GE(z, CrfPathScore(in.e, in.weights(), p));
  });
}

TEST(CrfTest, PathScoreMatchesNaive) {
  Rng rng(103);
  const Instance in = RandomInstance(rng, 5, 4);
  const std::vector<std::size_t> path{3, 0, 0, 2, 1};
  EXPECT_NEAR(CrfPathScore(in.e, in.weights(), path),
              NaivePathScore(in.e, in.trans, in.start, in.end, path), 1e-12);
}

TEST(CrfTest, NllIsNegativeLogOfEnumeratedProbability) {
  Rng rng(104);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.Index(5);
    const std::size_t k = 1 + rng.Index(4);
    const Instance in = RandomInstance(rng, n, k);
    std::vector<std::size_t> gold(n);
    for (auto& g : gold) g = rng.Index(k);
    const double nll = CrfNll(in.e, in.weights(), gold);
    const double ref = BruteLogPartition(in.e, in.trans, in.start, in.end) -
                       NaivePathScore(in.e, in.trans, in.start, in.end, gold);
    EXPECT_NEAR(nll, ref, 1e-9 * std::max(1.0, std::abs(ref)));
    EXPECT_GE(nll, -1e-9);
  }
}

TEST(CrfTest, NllClosedForms) {
  const std::size_t n = 5, k = 4;
  const Tensor e({n, k}), t({k, k}), s({1, k});
  const std::vector<std::size_t> gold{0, 1, 2, 3, 0};
  EXPECT_NEAR(CrfNll(e, {t, s, s}, gold), n * std::log(static_cast<double>(k)), 1e-12);

  Tensor peaked({n, k});
  for (std::size_t i = 0; i < n; ++i) peaked(i, gold[i]) = 1e3;
  EXPECT_NEAR(CrfNll(peaked, {t, s, s}, gold), 0.0, 1e-9);
}

TEST(CrfTest, GoldProbabilitiesSumToOne) {
  Rng rng(105);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::size_t k = 1; k <= 3; ++k) {
      const Instance in = RandomInstance(rng, n, k);
      double total = 0.0;
      ForEachPath(n, k, [&](const std::vector<std::size_t>& p) {
        total += std::exp(-CrfNll(in.e, in.weights(), p));
      });
      EXPECT_NEAR(total, 1.0, 1e-12) << n << "x" << k;
    }
  }
}

TEST(CrfTest, RejectsBadInput) {
  Rng rng(106);
  const Instance in = RandomInstance(rng, 3, 2);
  EXPECT_THROW(CrfNll(in.e, in.weights(), std::vector<std::size_t>{0, 2, 1}), Error);
  EXPECT_THROW(CrfNll(in.e, in.weights(), std::vector<std::size_t>{0, 1}), Error);
  EXPECT_THROW(CrfLogPartition(Tensor({0, 2}), in.weights()), Error);
  const std::vector<std::uint8_t> none{0, 0, 0};
  EXPECT_THROW(CrfLogPartition(in.e, in.weights(), none), Error);
  EXPECT_THROW(Viterbi(in.e, in.weights(), none), Error);
  const Tensor wrong({3, 3});
  EXPECT_THROW(CrfLogPartition(in.e, {wrong, in.start, in.end}), Error);
}

TEST(CrfTest, MaskedStepsAreSkipped) {
  Rng rng(107);
  const Instance in = RandomInstance(rng, 5, 3);
  const std::vector<std::uint8_t> mask{1, 0, 1, 1, 0};
  Tensor compact({3, 3});
  const std::size_t keep[] = {0, 2, 3};
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t j = 0; j < 3; ++j) compact(r, j) = in.e(keep[r], j);
  }
  EXPECT_NEAR(CrfLogPartition(in.e, in.weights(), mask),
              CrfLogPartition(compact, in.weights()), 1e-12);
  const std::vector<std::size_t> gold{2, 99, 0, 1, 99};  // masked entries ignored
  const std::vector<std::size_t> gold_compact{2, 0, 1};
  EXPECT_NEAR(CrfNll(in.e, in.weights(), gold, mask), CrfNll(compact, in.weights(), gold_compact),
              1e-12);
  const std::vector<std::size_t> path = Viterbi(in.e, in.weights(), mask);
  const std::vector<std::size_t> path_compact = Viterbi(compact, in.weights());
  EXPECT_EQ(path[1], kMaskedTag);
  EXPECT_EQ(path[4], kMaskedTag);
  EXPECT_EQ(path[0], path_compact[0]);
  EXPECT_EQ(path[2], path_compact[1]);
  EXPECT_EQ(path[3], path_compact[2]);
}

TEST(ViterbiTest, ScoreMatchesBruteForceMaximum) {
  Rng rng(108);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.Index(6);
    const std::size_t k = 1 + rng.Index(5);
    const Instance in = RandomInstance(rng, n, k);
    double score = 0.0;
    const std::vector<std::size_t> path = Viterbi(in.e, in.weights(), {}, &score);
    const double best = BruteMax(in.e, in.trans, in.start, in.end);
    EXPECT_NEAR(score, best, 1e-9 * std::max(1.0, std::abs(best)));
    EXPECT_NEAR(NaivePathScore(in.e, in.trans, in.start, in.end, path), best,
                1e-9 * std::max(1.0, std::abs(best)));
  }
}

TEST(ViterbiTest, ZeroTransitionsGivePerPositionArgmax) {
  Rng rng(109);
  const Tensor e = RandomTensor({6, 4}, rng);
  const Tensor t({4, 4}), s({1, 4});
  const std::vector<std::size_t> path = Viterbi(e, {t, s, s});
  for (std::size_t i = 0; i < 6; ++i) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < 4; ++j) {
      if (e(i, j) > e(i, arg)) arg = j;
    }
    EXPECT_EQ(path[i], arg);
  }
}

TEST(ViterbiTest, TiesGoToLowestIndex) {
  const Tensor e({4, 3}), t({3, 3}), s({1, 3});
  EXPECT_EQ(Viterbi(e, {t, s, s}), (std::vector<std::size_t>{0, 0, 0, 0}));
  const Tensor one({3, 1}), t1({1, 1}), s1({1, 1});
  EXPECT_EQ(Viterbi(one, {t1, s1, s1}), (std::vector<std::size_t>{0, 0, 0}));
}

TEST(ViterbiTest, InvariantToEmissionShift) {
  Rng rng(110);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = RandomInstance(rng, 5, 4);
    Tensor shifted = in.e;
    const double c = rng.Uniform(-10.0, 10.0);
    for (std::size_t i = 0; i < shifted.rows(); ++i) {
      for (std::size_t j = 0; j < shifted.cols(); ++j) shifted(i, j) += c;
    }
    EXPECT_EQ(Viterbi(in.e, in.weights()), Viterbi(shifted, in.weights()));
  }
}

TEST(CrfGradientTest, MatchesFiniteDifferences) {
  Rng rng(111);
  const Instance in = RandomInstance(rng, 4, 3, 1.0);
  const std::vector<std::size_t> gold{1, 0, 2, 2};
  const std::vector<std::uint8_t> mask{1, 1, 0, 1};
  const TapeFunction f = [&](Tape&, std::span<const Var> p) {
    return CrfNllNode(p[0], p[1], p[2], p[3], gold, mask);
  };
  const GradCheckResult r = GradCheck(f, {in.e, in.trans, in.start, in.end});
  EXPECT_LE(r.max_relative_error, 1e-6);
}

TEST(CrfGradientTest, EmissionGradientIsMarginalMinusGold) {
  // Rows of d nll / d emissions are (marginal - one-hot gold), so they sum to 0.
  Rng rng(112);
  const Instance in = RandomInstance(rng, 5, 4);
  const std::vector<std::size_t> gold{0, 3, 3, 1, 2};
  const CrfGradients g = CrfNllGradient(in.e, in.weights(), gold, {});
  for (std::size_t t = 0; t < 5; ++t) {
    double row = 0.0;
    for (std::size_t j = 0; j < 4; ++j) row += g.emissions(t, j);
    EXPECT_NEAR(row, 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace sdt
