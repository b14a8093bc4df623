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
#include "sdt/error.h"
#include "sdt/grad_check.h"
#include "sdt/ops.h"
#include "sdt/tape.h"
#include "test_util.h"

namespace sdt {
namespace {

using testing::RandomTensor;

constexpr double kTol = 1e-6;

void ExpectGradOk(const TapeFunction& f, std::vector<Tensor> params) {
  const GradCheckResult r = GradCheck(f, std::move(params));
  EXPECT_LE(r.max_relative_error, kTol)
      << "param " << r.worst_param << " index " << r.worst_index << " analytic "
      << r.worst_analytic << " numeric " << r.worst_numeric;
  EXPECT_GT(r.coordinates, 0u);
}

// Weighted sum so that every output element gets a distinct cotangent.
Var Project(Tape& tape, Var v, std::uint64_t seed) {
  Rng rng(seed);
  const Tensor w = RandomTensor(v.value().shape(), rng);
  return ops::Sum(ops::Mul(v, tape.Constant(w)));
}

TEST(PlainNumericsTest, LogSumExpAndSoftmax) {
  const std::vector<double> v{1000.0, 1000.0};
  EXPECT_NEAR(LogSumExp(v), 1000.0 + std::log(2.0), 1e-12);
  const std::vector<double> p = Softmax(v);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_THROW(LogSumExp(std::vector<double>{}), Error);
  EXPECT_THROW(Softmax(std::vector<double>{}), Error);
}

TEST(TapeTest, LeafGradientsLandInSlots) {
  Tape tape;
  const Tensor a = Tensor::Row({2.0, 3.0});
  const Tensor b = Tensor::Row({5.0, 7.0});
  Var x = tape.Leaf(a, 1);
  Var y = tape.Leaf(b, 0);
  Var z = ops::Sum(ops::Mul(x, y));
  std::vector<Tensor> grads{Tensor({1, 2}), Tensor({1, 2})};
  tape.Backward(z, grads);
  EXPECT_EQ(grads[1], b);
  EXPECT_EQ(grads[0], a);
}

TEST(TapeTest, GradientsAccumulateAcrossUses) {
  Tape tape;
  const Tensor a = Tensor::Scalar(3.0);
  Var x = tape.Leaf(a, 0);
  Var z = ops::Mul(x, x);  // 2x
  std::vector<Tensor> grads{Tensor({1, 1})};
  tape.Backward(z, grads);
  EXPECT_DOUBLE_EQ(grads[0].scalar(), 6.0);
}

TEST(TapeTest, ConstantsAndReferencesGetNoGradient) {
  Tape tape;
  const Tensor a = Tensor::Scalar(2.0);
  Var c = tape.Reference(a);
  Var z = ops::Mul(c, tape.Constant(Tensor::Scalar(4.0)));
  EXPECT_FALSE(tape.requires_grad(z));
  std::vector<Tensor> grads;
  tape.Backward(z, grads);
  EXPECT_EQ(tape.last_backward_visits(), 0u);
}

TEST(TapeTest, BackwardRequiresScalar) {
  Tape tape;
  const Tensor a = Tensor::Row({1.0, 2.0});
  Var x = tape.Leaf(a, 0);
  std::vector<Tensor> grads{Tensor({1, 2})};
  EXPECT_THROW(tape.Backward(ops::Tanh(x), grads), Error);
}

TEST(OpsGradTest, MatMulAllTransposes) {
  Rng rng(1);
  for (bool ta : {false, true}) {
    for (bool tb : {false, true}) {
      const Tensor a = ta ? RandomTensor({4, 3}, rng) : RandomTensor({3, 4}, rng);
      const Tensor b = tb ? RandomTensor({2, 4}, rng) : RandomTensor({4, 2}, rng);
      ExpectGradOk(
          [ta, tb](Tape& t, std::span<const Var> p) {
            return Project(t, ops::MatMul(p[0], p[1], {.trans_a = ta, .trans_b = tb}), 5);
          },
          {a, b});
    }
  }
}

TEST(OpsGradTest, AddWithRowBroadcast) {
  Rng rng(2);
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) { return Project(t, ops::Add(p[0], p[1]), 6); },
      {RandomTensor({3, 4}, rng), RandomTensor({1, 4}, rng)});
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) { return Project(t, ops::Add(p[0], p[1]), 7); },
      {RandomTensor({3, 4}, rng), RandomTensor({3, 4}, rng)});
}

TEST(OpsGradTest, ElementwiseOps) {
  Rng rng(3);
  const Tensor x = RandomTensor({3, 3}, rng, 2.0);
  const Tensor y = RandomTensor({3, 3}, rng, 2.0);
  ExpectGradOk([](Tape& t, std::span<const Var> p) { return Project(t, ops::Mul(p[0], p[1]), 8); },
               {x, y});
  ExpectGradOk([](Tape& t, std::span<const Var> p) { return Project(t, ops::Tanh(p[0]), 9); }, {x});
  ExpectGradOk([](Tape& t, std::span<const Var> p) { return Project(t, ops::Sigmoid(p[0]), 10); },
               {x});
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) { return Project(t, ops::Scale(p[0], -2.5), 11); }, {x});
}

TEST(OpsGradTest, SoftmaxAndLogSumExp) {
  Rng rng(4);
  ExpectGradOk([](Tape& t, std::span<const Var> p) { return Project(t, ops::Softmax(p[0]), 12); },
               {RandomTensor({5, 1}, rng, 3.0)});
  ExpectGradOk([](Tape& t, std::span<const Var> p) { return Project(t, ops::Softmax(p[0]), 13); },
               {RandomTensor({1, 6}, rng, 3.0)});
  ExpectGradOk([](Tape&, std::span<const Var> p) { return ops::LogSumExp(p[0]); },
               {RandomTensor({2, 3}, rng, 3.0)});
}

TEST(OpsGradTest, ConcatSliceGather) {
  Rng rng(5);
  const Tensor a = RandomTensor({2, 3}, rng);
  const Tensor b = RandomTensor({2, 2}, rng);
  const Tensor c = RandomTensor({1, 3}, rng);
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) {
        const Var parts[] = {p[0], p[1]};
        return Project(t, ops::ConcatCols(parts), 14);
      },
      {a, b});
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) {
        const Var parts[] = {p[0], p[1]};
        return Project(t, ops::ConcatRows(parts), 15);
      },
      {a, c});
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) { return Project(t, ops::SliceCols(p[0], 1, 3), 16); },
      {a});
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) { return Project(t, ops::SliceRows(p[0], 1, 2), 17); },
      {a});
  ExpectGradOk(
      [](Tape& t, std::span<const Var> p) { return Project(t, ops::Gather(p[0], {5, 0, 5}), 18); },
      {a});
}

TEST(OpsTest, ShapeErrors) {
  Tape tape;
  Var a = tape.Constant(Tensor({2, 3}));
  Var b = tape.Constant(Tensor({3, 2}));
  EXPECT_THROW(ops::Add(a, b), Error);
  EXPECT_THROW(ops::Mul(a, b), Error);
  EXPECT_THROW(ops::Softmax(a), Error);
  EXPECT_THROW(ops::SliceCols(a, 2, 4), Error);
  EXPECT_THROW(ops::Gather(a, {6}), Error);
  EXPECT_THROW(ops::ConcatRows(std::span<const Var>()), Error);
}

TEST(GradCheckTest, DetectsAWrongGradient) {
  // A primitive with a deliberately wrong backward: d/dx x^2 reported as x.
  const TapeFunction broken = [](Tape& t, std::span<const Var> p) {
    Tensor out = p[0].value();
    for (double& v : out.values()) v *= v;
    Var sq = t.Record(std::move(out), {p[0]}, [](BackwardContext& c) {
      Tensor& g = c.input_grad(0);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += c.output_grad()[i] * c.input(0)[i];
    });
    return ops::Sum(sq);
  };
  const GradCheckResult r = GradCheck(broken, {Tensor::Row({1.0, 2.0})});
  EXPECT_GT(r.max_relative_error, 0.1);
}

TEST(GradCheckTest, RejectsStepOutsideRange) {
  const TapeFunction f = [](Tape&, std::span<const Var> p) { return ops::Sum(p[0]); };
  EXPECT_THROW(GradCheck(f, {Tensor::Row({1.0})}, 1e-2), Error);
  EXPECT_THROW(GradCheck(f, {Tensor::Row({1.0})}, 1e-9), Error);
}

}  // namespace
}  // namespace sdt
