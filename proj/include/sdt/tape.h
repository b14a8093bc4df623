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

#ifndef SDT_TAPE_H_
#define SDT_TAPE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "sdt/tensor.h"

namespace sdt {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape* tape() const { return tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }
  const Tensor& value() const;

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

// View handed to a node's backward function.
class BackwardContext {
 public:
  BackwardContext(Tape& tape, std::uint32_t id) : tape_(tape), id_(id) {}

  const Tensor& output() const;
  const Tensor& output_grad() const;
  std::size_t input_count() const;
  const Tensor& input(std::size_t i) const;
  bool needs_grad(std::size_t i) const;
  // Zero-initialized on first access.
  Tensor& input_grad(std::size_t i);

 private:
  Tape& tape_;
  std::uint32_t id_;
};

using BackwardFn = std::function<void(BackwardContext&)>;

// Records primitive operations in creation order; Backward replays them in
// reverse, which is a reverse topological order because every node's inputs
// precede it.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var Constant(Tensor value);
  // A non-differentiable reference to an external tensor that must outlive
  // the tape.
  Var Reference(const Tensor& value);
  // A differentiable leaf. Its gradient is added into leaf_grads[slot]
  // by Backward. The tensor is referenced, not copied, and must outlive
  // the tape.
  Var Leaf(const Tensor& value, std::size_t slot);
  Var Record(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var Record(Tensor value, std::span<const Var> inputs, BackwardFn fn);

  const Tensor& value(Var v) const { return nodes_[v.id()].value(); }
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(output)/d(output) = 1 (output must be a scalar) and accumulates
  // leaf gradients. leaf_grads[slot] must already be shaped like the leaf.
  void Backward(Var output, std::span<Tensor> leaf_grads);

  // Number of nodes whose backward function ran in the last Backward call.
  std::size_t last_backward_visits() const { return last_visits_; }

 private:
  friend class BackwardContext;

  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    std::vector<std::uint32_t> inputs;
    BackwardFn backward;
    std::int64_t leaf_slot = -1;
    bool requires_grad = false;

    const Tensor& value() const { return external ? *external : owned; }
  };

  Var Push(Node node);
  Tensor& GradOf(std::uint32_t id);

  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::size_t last_visits_ = 0;
};

}  // namespace sdt

#endif  // SDT_TAPE_H_
