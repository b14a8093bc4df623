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

#include "sdt/tensor.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "sdt/error.h"

namespace sdt {

std::size_t ShapeProduct(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << 'x';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape)
    : shape_(std::move(shape)), values_(ShapeProduct(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (ShapeProduct(shape_) != values_.size()) {
    throw ValidationError("tensor shape " + ShapeString(shape_) +
                          " does not match " +
                          std::to_string(values_.size()) + " values");
  }
}

double Tensor::scalar() const {
  if (values_.size() != 1) {
    throw ValidationError("scalar() on tensor of shape " +
                          ShapeString(shape_));
  }
  return values_[0];
}

void Tensor::Fill(double value) {
  for (double& v : values_) v = value;
}

bool Tensor::AllFinite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool Tensor::operator==(const Tensor& other) const {
  return shape_ == other.shape_ &&
         (values_.empty() ||
          std::memcmp(values_.data(), other.values_.data(),
                      values_.size() * sizeof(double)) == 0);
}

}  // namespace sdt
