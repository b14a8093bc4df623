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

#ifndef SDT_GRAD_CHECK_H_
#define SDT_GRAD_CHECK_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sdt/tape.h"

namespace sdt {

// Builds a scalar on the tape from leaf variables standing for params.
using TapeFunction = std::function<Var(Tape&, std::span<const Var>)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
};

// Compares reverse-mode gradients with central differences over every
// coordinate: |analytic - numeric| / max(floor, |analytic| + |numeric|).
// eps must lie in [1e-6, 1e-4]. Raise floor when f is large enough that
// rounding in the differences swamps tiny gradient entries.
GradCheckResult GradCheck(const TapeFunction& f, std::vector<Tensor> params,
                          double eps = 1e-5, double floor = 1e-8);

// Reverse-mode gradient of f at params, one tensor per param.
std::vector<Tensor> Gradient(const TapeFunction& f,
                             std::span<const Tensor> params, double* value);

}  // namespace sdt

#endif  // SDT_GRAD_CHECK_H_
