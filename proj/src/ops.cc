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

#include "sdt/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdt/error.h"

namespace sdt {

double LogSumExp(std::span<const double> v) {
  if (v.empty()) throw ValidationError("logsumexp of empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> Softmax(std::span<const double> v) {
  if (v.empty()) throw ValidationError("softmax of empty vector");
  const double m = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += out[i] = std::exp(v[i] - m);
  for (double& x : out) x /= s;
  return out;
}

namespace ops {
namespace {

Tape& TapeOf(Var v) {
  if (!v.valid()) throw InternalError("operation on an empty Var");
  return *v.tape();
}

void RequireRank2(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw ValidationError(std::string(op) + " expects rank 2, got " +
                          ShapeString(t.shape()));
  }
}

bool IsVector(const Tensor& t) {
  return t.rank() == 2 && (t.rows() == 1 || t.cols() == 1);
}

}  // namespace

Var MatMul(Var a, Var b, kernels::GemmArgs args) {
  args.accumulate = false;
  Tensor out = kernels::MatMul(a.value(), b.value(), args);
  return TapeOf(a).Record(std::move(out), {a, b}, [args](BackwardContext& c) {
    const Tensor& g = c.output_grad();
    // out = op(A) op(B)
    if (c.needs_grad(0)) {
      kernels::GemmArgs ga{.accumulate = true};
      if (!args.trans_a) {
        // dA = g op(B)^T
        ga.trans_a = false;
        ga.trans_b = !args.trans_b;
        kernels::Gemm(g, c.input(1), c.input_grad(0), ga);
      } else {
        // dA = op(B) g^T
        ga.trans_a = args.trans_b;
        ga.trans_b = true;
        kernels::Gemm(c.input(1), g, c.input_grad(0), ga);
      }
    }
    if (c.needs_grad(1)) {
      kernels::GemmArgs gb{.accumulate = true};
      if (!args.trans_b) {
        // dB = op(A)^T g
        gb.trans_a = !args.trans_a;
        gb.trans_b = false;
        kernels::Gemm(c.input(0), g, c.input_grad(1), gb);
      } else {
        // dB = g^T op(A)
        gb.trans_a = true;
        gb.trans_b = args.trans_a;
        kernels::Gemm(g, c.input(0), c.input_grad(1), gb);
      }
    }
  });
}

Var Add(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  RequireRank2(x, "add");
  RequireRank2(y, "add");
  const bool broadcast = !x.SameShape(y);
  if (broadcast && !(y.rows() == 1 && y.cols() == x.cols())) {
    throw ValidationError("add shape mismatch " + ShapeString(x.shape()) +
                          " + " + ShapeString(y.shape()));
  }
  Tensor out = x;
  const std::size_t cols = x.cols();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += broadcast ? y[i % cols] : y[i];
  }
  return TapeOf(a).Record(std::move(out), {a, b}, [broadcast, cols](
                                                      BackwardContext& c) {
    const Tensor& g = c.output_grad();
    if (c.needs_grad(0)) {
      Tensor& ga = c.input_grad(0);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (c.needs_grad(1)) {
      Tensor& gb = c.input_grad(1);
      for (std::size_t i = 0; i < g.size(); ++i) {
        gb[broadcast ? i % cols : i] += g[i];
      }
    }
  });
}

Var Mul(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (!x.SameShape(y)) {
    throw ValidationError("mul shape mismatch " + ShapeString(x.shape()) +
                          " * " + ShapeString(y.shape()));
  }
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= y[i];
  return TapeOf(a).Record(std::move(out), {a, b}, [](BackwardContext& c) {
    const Tensor& g = c.output_grad();
    if (c.needs_grad(0)) {
      Tensor& ga = c.input_grad(0);
      const Tensor& y = c.input(1);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i];
    }
    if (c.needs_grad(1)) {
      Tensor& gb = c.input_grad(1);
      const Tensor& x = c.input(0);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * x[i];
    }
  });
}

Var Scale(Var a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return TapeOf(a).Record(std::move(out), {a}, [factor](BackwardContext& c) {
    const Tensor& g = c.output_grad();
    Tensor& ga = c.input_grad(0);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * factor;
  });
}

Var Tanh(Var a) {
  Tensor out(a.value().shape());
  kernels::Tanh(a.value(), out);
  return TapeOf(a).Record(std::move(out), {a}, [](BackwardContext& c) {
    const Tensor& g = c.output_grad();
    const Tensor& y = c.output();
    Tensor& ga = c.input_grad(0);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var Sigmoid(Var a) {
  Tensor out(a.value().shape());
  kernels::Sigmoid(a.value(), out);
  return TapeOf(a).Record(std::move(out), {a}, [](BackwardContext& c) {
    const Tensor& g = c.output_grad();
    const Tensor& y = c.output();
    Tensor& ga = c.input_grad(0);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

Var Softmax(Var a) {
  const Tensor& x = a.value();
  if (!IsVector(x)) {
    throw ValidationError("softmax expects a vector, got " +
                          ShapeString(x.shape()));
  }
  Tensor out(x.shape(), sdt::Softmax(x.values()));
  return TapeOf(a).Record(std::move(out), {a}, [](BackwardContext& c) {
    const Tensor& g = c.output_grad();
    const Tensor& y = c.output();
    double dot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * y[i];
    Tensor& ga = c.input_grad(0);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += y[i] * (g[i] - dot);
  });
}

Var LogSumExp(Var a) {
  const double lse = sdt::LogSumExp(a.value().values());
  return TapeOf(a).Record(Tensor::Scalar(lse), {a}, [](BackwardContext& c) {
    const double g = c.output_grad()[0];
    const double lse = c.output()[0];
    const Tensor& x = c.input(0);
    Tensor& ga = c.input_grad(0);
    for (std::size_t i = 0; i < x.size(); ++i) ga[i] += g * std::exp(x[i] - lse);
  });
}

Var ConcatCols(std::span<const Var> parts) {
  if (parts.empty()) throw ValidationError("concat of nothing");
  const std::size_t rows = parts[0].value().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> widths;
  for (const Var& p : parts) {
    RequireRank2(p.value(), "concat");
    if (p.value().rows() != rows) {
      throw ValidationError("concat_cols row mismatch");
    }
    widths.push_back(p.value().cols());
    cols += p.value().cols();
  }
  Tensor out({rows, cols});
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < v.cols(); ++j) out(r, offset + j) = v(r, j);
    }
    offset += v.cols();
  }
  return TapeOf(parts[0]).Record(
      std::move(out), parts, [widths, rows](BackwardContext& c) {
        const Tensor& g = c.output_grad();
        std::size_t offset = 0;
        for (std::size_t k = 0; k < widths.size(); ++k) {
          if (c.needs_grad(k)) {
            Tensor& gk = c.input_grad(k);
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t j = 0; j < widths[k]; ++j) {
                gk(r, j) += g(r, offset + j);
              }
            }
          }
          offset += widths[k];
        }
      });
}

Var ConcatRows(std::span<const Var> parts) {
  if (parts.empty()) throw ValidationError("concat of nothing");
  const std::size_t cols = parts[0].value().cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    RequireRank2(p.value(), "concat");
    if (p.value().cols() != cols) {
      throw ValidationError("concat_rows column mismatch");
    }
    rows += p.value().rows();
  }
  std::vector<double> values;
  values.reserve(rows * cols);
  for (const Var& p : parts) {
    const auto v = p.value().values();
    values.insert(values.end(), v.begin(), v.end());
  }
  return TapeOf(parts[0]).Record(
      Tensor({rows, cols}, std::move(values)), parts, [](BackwardContext& c) {
        const Tensor& g = c.output_grad();
        std::size_t offset = 0;
        for (std::size_t k = 0; k < c.input_count(); ++k) {
          const std::size_t n = c.input(k).size();
          if (c.needs_grad(k)) {
            Tensor& gk = c.input_grad(k);
            for (std::size_t i = 0; i < n; ++i) gk[i] += g[offset + i];
          }
          offset += n;
        }
      });
}

Var SliceCols(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = a.value();
  RequireRank2(x, "slice_cols");
  if (begin > end || end > x.cols()) {
    throw ValidationError("slice_cols out of range");
  }
  const std::size_t rows = x.rows();
  const std::size_t width = end - begin;
  Tensor out({rows, width});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < width; ++j) out(r, j) = x(r, begin + j);
  }
  return TapeOf(a).Record(std::move(out), {a}, [begin, width](
                                                  BackwardContext& c) {
    const Tensor& g = c.output_grad();
    Tensor& ga = c.input_grad(0);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t j = 0; j < width; ++j) ga(r, begin + j) += g(r, j);
    }
  });
}

Var SliceRows(Var a, std::size_t begin, std::size_t end) {
  const Tensor& x = a.value();
  RequireRank2(x, "slice_rows");
  if (begin > end || end > x.rows()) {
    throw ValidationError("slice_rows out of range");
  }
  const std::size_t cols = x.cols();
  const auto v = x.values();
  std::vector<double> values(v.begin() + begin * cols, v.begin() + end * cols);
  return TapeOf(a).Record(
      Tensor({end - begin, cols}, std::move(values)), {a},
      [begin, cols](BackwardContext& c) {
        const Tensor& g = c.output_grad();
        Tensor& ga = c.input_grad(0);
        const std::size_t offset = begin * cols;
        for (std::size_t i = 0; i < g.size(); ++i) ga[offset + i] += g[i];
      });
}

Var Sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return TapeOf(a).Record(Tensor::Scalar(s), {a}, [](BackwardContext& c) {
    const double g = c.output_grad()[0];
    Tensor& ga = c.input_grad(0);
    for (double& v : ga.values()) v += g;
  });
}

Var Gather(Var a, std::vector<std::size_t> indices) {
  const Tensor& x = a.value();
  std::vector<double> values;
  values.reserve(indices.size());
  for (std::size_t idx : indices) {
    if (idx >= x.size()) throw ValidationError("gather index out of range");
    values.push_back(x[idx]);
  }
  return TapeOf(a).Record(
      Tensor::Row(std::move(values)), {a},
      [indices = std::move(indices)](BackwardContext& c) {
        const Tensor& g = c.output_grad();
        Tensor& ga = c.input_grad(0);
        for (std::size_t i = 0; i < indices.size(); ++i) ga[indices[i]] += g[i];
      });
}

}  // namespace ops
}  // namespace sdt
