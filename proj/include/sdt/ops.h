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

#ifndef SDT_OPS_H_
#define SDT_OPS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "sdt/kernels.h"
#include "sdt/tape.h"

namespace sdt {

// Plain numerics.
double LogSumExp(std::span<const double> v);
std::vector<double> Softmax(std::span<const double> v);

// Differentiable primitives. All values are rank-2.
namespace ops {

Var MatMul(Var a, Var b, kernels::GemmArgs args = {});
// b has the shape of a, or is a 1 x cols row broadcast over a's rows.
Var Add(Var a, Var b);
Var Mul(Var a, Var b);
Var Scale(Var a, double factor);
Var Tanh(Var a);
Var Sigmoid(Var a);
// Softmax over every element of a vector-shaped (1 x n or n x 1) value.
Var Softmax(Var a);
// Scalar log-sum-exp over all elements.
Var LogSumExp(Var a);
Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var SliceCols(Var a, std::size_t begin, std::size_t end);
Var SliceRows(Var a, std::size_t begin, std::size_t end);
Var Sum(Var a);
// Picks flat (row-major) elements; result is 1 x indices.size().
Var Gather(Var a, std::vector<std::size_t> indices);

}  // namespace ops
}  // namespace sdt

#endif  // SDT_OPS_H_
