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

#ifndef SDT_LBFGS_H_
#define SDT_LBFGS_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sdt {

// Returns f(x) and writes its gradient.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-5;  // on the Euclidean norm
  std::size_t history = 10;
  double armijo = 1e-4;
  int max_backtracks = 40;
};

struct LbfgsResult {
  int iterations = 0;
  bool converged = false;
  double value = 0.0;
  double gradient_norm = 0.0;
  std::vector<double> values;  // objective after each accepted step, starting with f(x0)
};

// Limited-memory BFGS minimization with backtracking line search. `x`
// holds the starting point and receives the minimizer.
LbfgsResult MinimizeLbfgs(const Objective& f, std::vector<double>& x,
                          const LbfgsOptions& options = {});

}  // namespace sdt

#endif  // SDT_LBFGS_H_
