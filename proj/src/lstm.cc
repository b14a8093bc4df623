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

#include "sdt/lstm.h"

#include "sdt/error.h"
#include "sdt/ops.h"

namespace sdt {

LstmParams LstmParams::Initialize(std::size_t input, std::size_t hidden, Rng& rng) {
  LstmParams p;
  p.input_weights = Tensor({input, 4 * hidden});
  p.recurrent_weights = Tensor({hidden, 4 * hidden});
  p.bias = Tensor({1, 4 * hidden});
  for (double& v : p.input_weights.values()) v = rng.Uniform(-0.05, 0.05);
  for (double& v : p.recurrent_weights.values()) v = rng.Uniform(-0.05, 0.05);
  for (std::size_t j = 0; j < 4 * hidden; ++j) {
    const bool forget = j >= hidden && j < 2 * hidden;
    p.bias[j] = forget ? 1.0 : rng.Uniform(-0.05, 0.05);
  }
  return p;
}

std::vector<Var> RunLstm(const LstmVars& cell, Var inputs, std::size_t hidden,
                         const LstmOptions& options) {
  Tape& tape = *inputs.tape();
  const std::size_t steps = inputs.value().rows();
  if (cell.input_weights.value().rows() != inputs.value().cols()) {
    throw ValidationError("lstm input width " + std::to_string(inputs.value().cols()) +
                          " does not match weights " +
                          ShapeString(cell.input_weights.value().shape()));
  }
  std::vector<Var> states(steps);
  if (steps == 0) return states;
  // All input projections in one product.
  Var projected = ops::Add(ops::MatMul(inputs, cell.input_weights), cell.bias);
  Var recurrent_mask;
  if (options.recurrent_mask != nullptr) {
    recurrent_mask = tape.Constant(*options.recurrent_mask);
  }
  Var h, c;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t t = options.reverse ? steps - 1 - k : k;
    Var gates = ops::SliceRows(projected, t, t + 1);
    if (k > 0) {
      Var h_in = recurrent_mask.valid() ? ops::Mul(h, recurrent_mask) : h;
      gates = ops::Add(gates, ops::MatMul(h_in, cell.recurrent_weights));
    }
    Var i = ops::Sigmoid(ops::SliceCols(gates, 0, hidden));
    Var f = ops::Sigmoid(ops::SliceCols(gates, hidden, 2 * hidden));
    Var o = ops::Sigmoid(ops::SliceCols(gates, 2 * hidden, 3 * hidden));
    Var g = ops::Tanh(ops::SliceCols(gates, 3 * hidden, 4 * hidden));
    c = k == 0 ? ops::Mul(i, g) : ops::Add(ops::Mul(f, c), ops::Mul(i, g));
    h = ops::Mul(o, ops::Tanh(c));
    states[t] = h;
  }
  return states;
}

}  // namespace sdt
