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

#include "sdt/lbfgs.h"

#include <cmath>
#include <deque>

#include "sdt/error.h"

namespace sdt {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

LbfgsResult MinimizeLbfgs(const Objective& f, std::vector<double>& x,
                          const LbfgsOptions& options) {
  const std::size_t n = x.size();
  LbfgsResult result;
  std::vector<double> g(n), direction(n), x_new(n), g_new(n);
  double fx = f(x, g);
  if (!std::isfinite(fx)) throw ValidationError("lbfgs: objective is not finite at the start");
  result.values.push_back(fx);
  std::deque<Pair> memory;
  std::vector<double> alpha;

  for (;;) {
    result.gradient_norm = std::sqrt(Dot(g, g));
    result.value = fx;
    if (result.gradient_norm <= options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_iterations) break;

    // Two-loop recursion.
    for (std::size_t i = 0; i < n; ++i) direction[i] = -g[i];
    alpha.assign(memory.size(), 0.0);
    for (std::size_t k = memory.size(); k-- > 0;) {
      alpha[k] = memory[k].rho * Dot(memory[k].s, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] -= alpha[k] * memory[k].y[i];
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      const double gamma = Dot(last.s, last.y) / Dot(last.y, last.y);
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * Dot(memory[k].y, direction);
      for (std::size_t i = 0; i < n; ++i) direction[i] += (alpha[k] - beta) * memory[k].s[i];
    }
    double slope = Dot(g, direction);
    if (!(slope < 0.0)) {
      memory.clear();
      for (std::size_t i = 0; i < n; ++i) direction[i] = -g[i];
      slope = -Dot(g, g);
    }

    double step = memory.empty() ? std::min(1.0, 1.0 / result.gradient_norm) : 1.0;
    bool accepted = false;
    double f_new = 0.0;
    for (int b = 0; b < options.max_backtracks; ++b) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * direction[i];
      f_new = f(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= fx + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further progress possible at machine precision

    Pair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_new[i] - x[i];
      pair.y[i] = g_new[i] - g[i];
    }
    const double sy = Dot(pair.s, pair.y);
    if (sy > 1e-12 * std::sqrt(Dot(pair.y, pair.y) * Dot(pair.s, pair.s))) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (memory.size() > options.history) memory.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    ++result.iterations;
    result.values.push_back(fx);
  }
  return result;
}

}  // namespace sdt
