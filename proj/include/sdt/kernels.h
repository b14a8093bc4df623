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

#ifndef SDT_KERNELS_H_
#define SDT_KERNELS_H_

#include <cstddef>
#include <cstdint>

#include "sdt/tensor.h"

namespace sdt::kernels {

// Dense GEMM: c (m x n) = op(a) * op(b) [+ c when accumulate].
// op(x) is x or its transpose. Both the OpenMP and the serial variant use
// the same per-element summation order, so results are bitwise identical
// regardless of thread count.
struct GemmArgs {
  bool trans_a = false;
  bool trans_b = false;
  bool accumulate = false;
};

void Gemm(const Tensor& a, const Tensor& b, Tensor& c, GemmArgs args = {});
Tensor MatMul(const Tensor& a, const Tensor& b, GemmArgs args = {});

namespace serial {
void Gemm(const Tensor& a, const Tensor& b, Tensor& c, GemmArgs args = {});
}  // namespace serial

// Elementwise kernels over flat arrays; parallel above a size threshold.
void Tanh(const Tensor& x, Tensor& y);
void Sigmoid(const Tensor& x, Tensor& y);

namespace serial {
void Tanh(const Tensor& x, Tensor& y);
void Sigmoid(const Tensor& x, Tensor& y);
}  // namespace serial

// Thread cap for every parallel region. Initialized from SDT_THREADS when
// set, otherwise the OpenMP default.
int MaxThreads();
void SetMaxThreads(int threads);

// Work below this many multiply-adds runs serially.
inline constexpr std::size_t kParallelFlopThreshold = 1 << 15;

}  // namespace sdt::kernels

#endif  // SDT_KERNELS_H_
