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

#include "sdt/grad_check.h"

#include <cmath>

#include "sdt/error.h"

namespace sdt {
namespace {

double Evaluate(const TapeFunction& f, std::span<const Tensor> params) {
  Tape tape;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    leaves.push_back(tape.Leaf(params[i], i));
  }
  const double v = f(tape, leaves).value().scalar();
  if (!std::isfinite(v)) throw ValidationError("grad_check: f is not finite");
  return v;
}

}  // namespace

std::vector<Tensor> Gradient(const TapeFunction& f,
                             std::span<const Tensor> params, double* value) {
  Tape tape;
  std::vector<Var> leaves;
  std::vector<Tensor> grads;
  for (std::size_t i = 0; i < params.size(); ++i) {
    leaves.push_back(tape.Leaf(params[i], i));
    grads.emplace_back(params[i].shape());
  }
  Var out = f(tape, leaves);
  if (value != nullptr) *value = out.value().scalar();
  if (!std::isfinite(out.value().scalar())) {
    throw ValidationError("grad_check: f is not finite");
  }
  tape.Backward(out, grads);
  return grads;
}

GradCheckResult GradCheck(const TapeFunction& f, std::vector<Tensor> params,
                          double eps, double floor) {
  if (!(eps >= 1e-6 && eps <= 1e-4)) {
    throw ValidationError("grad_check eps must lie in [1e-6, 1e-4]");
  }
  if (!(floor > 0.0)) throw ValidationError("grad_check floor must be positive");
  const std::vector<Tensor> analytic = Gradient(f, params, nullptr);
  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double saved = params[p][i];
      params[p][i] = saved + eps;
      const double plus = Evaluate(f, params);
      params[p][i] = saved - eps;
      const double minus = Evaluate(f, params);
      params[p][i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double a = analytic[p][i];
      const double err =
          std::abs(a - numeric) / std::max(floor, std::abs(a) + std::abs(numeric));
      ++result.coordinates;
      if (err > result.max_relative_error || result.coordinates == 1) {
        result.max_relative_error = err;
        result.worst_param = p;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace sdt
