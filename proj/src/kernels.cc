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

#include "sdt/kernels.h"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <cstdlib>

#include "sdt/error.h"

namespace sdt::kernels {
namespace {

struct GemmDims {
  std::size_t m, n, k;
};

GemmDims CheckGemm(const Tensor& a, const Tensor& b, const Tensor& c,
                   const GemmArgs& args) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw ValidationError("gemm operands must be rank 2, got " +
                          ShapeString(a.shape()) + " and " +
                          ShapeString(b.shape()));
  }
  const std::size_t m = args.trans_a ? a.cols() : a.rows();
  const std::size_t ka = args.trans_a ? a.rows() : a.cols();
  const std::size_t kb = args.trans_b ? b.cols() : b.rows();
  const std::size_t n = args.trans_b ? b.rows() : b.cols();
  if (ka != kb) {
    throw ValidationError("gemm inner dimensions differ: " +
                          ShapeString(a.shape()) + " * " +
                          ShapeString(b.shape()));
  }
  if (c.rank() != 2 || c.rows() != m || c.cols() != n) {
    throw ValidationError("gemm output shape " + ShapeString(c.shape()) +
                          " should be [" + std::to_string(m) + "x" +
                          std::to_string(n) + "]");
  }
  return {m, n, ka};
}

// One output row; shared by both variants so summation order matches.
inline void GemmRow(const Tensor& a, const Tensor& b, Tensor& c,
                    const GemmArgs& args, const GemmDims& d, std::size_t i) {
  const double* av = a.values().data();
  const double* bv = b.values().data();
  double* row = c.values().data() + i * d.n;
  if (!args.accumulate) {
    for (std::size_t j = 0; j < d.n; ++j) row[j] = 0.0;
  }
  const std::size_t a_cols = a.cols();
  const std::size_t b_cols = b.cols();
  for (std::size_t p = 0; p < d.k; ++p) {
    const double aip = args.trans_a ? av[p * a_cols + i] : av[i * a_cols + p];
    if (aip == 0.0) continue;
    if (!args.trans_b) {
      const double* brow = bv + p * b_cols;
      for (std::size_t j = 0; j < d.n; ++j) row[j] += aip * brow[j];
    } else {
      for (std::size_t j = 0; j < d.n; ++j) row[j] += aip * bv[j * b_cols + p];
    }
  }
}

std::atomic<int> g_max_threads{0};

int InitialThreads() {
  if (const char* env = std::getenv("SDT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return omp_get_max_threads();
}

}  // namespace

int MaxThreads() {
  int n = g_max_threads.load(std::memory_order_relaxed);
  if (n == 0) {
    n = InitialThreads();
    g_max_threads.store(n, std::memory_order_relaxed);
  }
  return n;
}

void SetMaxThreads(int threads) {
  g_max_threads.store(threads > 0 ? threads : InitialThreads(),
                      std::memory_order_relaxed);
}

void Gemm(const Tensor& a, const Tensor& b, Tensor& c, GemmArgs args) {
  const GemmDims d = CheckGemm(a, b, c, args);
  const bool parallel = d.m > 1 && d.m * d.n * d.k >= kParallelFlopThreshold &&
                        !omp_in_parallel();
  const long rows = static_cast<long>(d.m);
#pragma omp parallel for schedule(static) num_threads(MaxThreads()) if (parallel)
  for (long i = 0; i < rows; ++i) {
    GemmRow(a, b, c, args, d, static_cast<std::size_t>(i));
  }
}

Tensor MatMul(const Tensor& a, const Tensor& b, GemmArgs args) {
  const std::size_t m = args.trans_a ? a.cols() : a.rows();
  const std::size_t n = args.trans_b ? b.rows() : b.cols();
  Tensor c({m, n});
  args.accumulate = false;
  Gemm(a, b, c, args);
  return c;
}

void Tanh(const Tensor& x, Tensor& y) {
  const std::size_t n = x.size();
  const double* in = x.values().data();
  double* out = y.values().data();
  const bool parallel = n >= kParallelFlopThreshold && !omp_in_parallel();
#pragma omp parallel for schedule(static) num_threads(MaxThreads()) if (parallel)
  for (long i = 0; i < static_cast<long>(n); ++i) out[i] = std::tanh(in[i]);
}

void Sigmoid(const Tensor& x, Tensor& y) {
  const std::size_t n = x.size();
  const double* in = x.values().data();
  double* out = y.values().data();
  const bool parallel = n >= kParallelFlopThreshold && !omp_in_parallel();
#pragma omp parallel for schedule(static) num_threads(MaxThreads()) if (parallel)
  for (long i = 0; i < static_cast<long>(n); ++i) {
    out[i] = 1.0 / (1.0 + std::exp(-in[i]));
  }
}

namespace serial {

void Gemm(const Tensor& a, const Tensor& b, Tensor& c, GemmArgs args) {
  const GemmDims d = CheckGemm(a, b, c, args);
  for (std::size_t i = 0; i < d.m; ++i) GemmRow(a, b, c, args, d, i);
}

void Tanh(const Tensor& x, Tensor& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
}

void Sigmoid(const Tensor& x, Tensor& y) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = 1.0 / (1.0 + std::exp(-x[i]));
  }
}

}  // namespace serial
}  // namespace sdt::kernels
