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

#ifndef SDT_TENSOR_H_
#define SDT_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sdt {

using Shape = std::vector<std::size_t>;

// Dense row-major tensor of doubles. Most arithmetic works on rank-2
// tensors; rank-3 is used only to hold padded embedding blocks.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor Zeros(std::size_t rows, std::size_t cols) {
    return Tensor({rows, cols});
  }
  static Tensor Scalar(double value) { return Tensor({1, 1}, {value}); }
  static Tensor Row(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({1, n}, std::move(values));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  // Rank-2 accessors.
  std::size_t rows() const { return shape_.at(0); }
  std::size_t cols() const { return shape_.at(1); }
  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * shape_[1] + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * shape_[1] + c];
  }

  // Rank-3 accessor.
  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return values_[(i * shape_[1] + j) * shape_[2] + k];
  }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& storage() { return values_; }

  double scalar() const;
  void Fill(double value);
  bool AllFinite() const;
  bool SameShape(const Tensor& other) const { return shape_ == other.shape_; }

  // Bitwise equality of shape and values.
  bool operator==(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<double> values_;
};

std::string ShapeString(const Shape& shape);
std::size_t ShapeProduct(const Shape& shape);

}  // namespace sdt

#endif  // SDT_TENSOR_H_
