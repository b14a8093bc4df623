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

#ifndef SDT_LSTM_H_
#define SDT_LSTM_H_

#include <cstddef>
#include <vector>

#include "sdt/rng.h"
#include "sdt/tape.h"
#include "sdt/tensor.h"

namespace sdt {

// Standard LSTM cell. Gate columns are laid out [input, forget, output,
// candidate], each `hidden` wide.
struct LstmParams {
  Tensor input_weights;      // in x 4h
  Tensor recurrent_weights;  // h x 4h
  Tensor bias;               // 1 x 4h

  std::size_t input_size() const { return input_weights.rows(); }
  std::size_t hidden() const { return recurrent_weights.rows(); }

  // Uniform [-0.05, 0.05] everywhere except the forget-gate bias, which
  // starts at 1.
  static LstmParams Initialize(std::size_t input, std::size_t hidden, Rng& rng);
};

struct LstmVars {
  Var input_weights;
  Var recurrent_weights;
  Var bias;
};

// Scales applied to h_{t-1} before the recurrent product (training-time
// dropout); nullptr disables it.
struct LstmOptions {
  bool reverse = false;
  const Tensor* recurrent_mask = nullptr;  // 1 x hidden
};

// Runs the cell over the rows of `inputs` (steps x in) from a zero state.
// Returns one 1 x hidden state per row, in row order.
std::vector<Var> RunLstm(const LstmVars& cell, Var inputs, std::size_t hidden,
                         const LstmOptions& options = {});

}  // namespace sdt

#endif  // SDT_LSTM_H_
