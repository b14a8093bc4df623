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

#include "sdt/tape.h"

#include "sdt/error.h"

namespace sdt {

const Tensor& Var::value() const { return tape_->value(*this); }

const Tensor& BackwardContext::output() const {
  return tape_.nodes_[id_].value();
}

const Tensor& BackwardContext::output_grad() const { return tape_.grads_[id_]; }

std::size_t BackwardContext::input_count() const {
  return tape_.nodes_[id_].inputs.size();
}

const Tensor& BackwardContext::input(std::size_t i) const {
  return tape_.nodes_[tape_.nodes_[id_].inputs[i]].value();
}

bool BackwardContext::needs_grad(std::size_t i) const {
  return tape_.nodes_[tape_.nodes_[id_].inputs[i]].requires_grad;
}

Tensor& BackwardContext::input_grad(std::size_t i) {
  return tape_.GradOf(tape_.nodes_[id_].inputs[i]);
}

Var Tape::Push(Node node) {
  if (nodes_.size() >= UINT32_MAX) throw InternalError("tape overflow");
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<std::uint32_t>(nodes_.size() - 1));
}

Var Tape::Constant(Tensor value) {
  Node node;
  node.owned = std::move(value);
  return Push(std::move(node));
}

Var Tape::Reference(const Tensor& value) {
  Node node;
  node.external = &value;
  return Push(std::move(node));
}

Var Tape::Leaf(const Tensor& value, std::size_t slot) {
  Node node;
  node.external = &value;
  node.leaf_slot = static_cast<std::int64_t>(slot);
  node.requires_grad = true;
  return Push(std::move(node));
}

Var Tape::Record(Tensor value, std::initializer_list<Var> inputs,
                 BackwardFn fn) {
  return Record(std::move(value),
                std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
}

Var Tape::Record(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  Node node;
  node.owned = std::move(value);
  node.inputs.reserve(inputs.size());
  for (const Var& in : inputs) {
    if (in.tape() != this) throw InternalError("input from another tape");
    node.inputs.push_back(in.id());
    node.requires_grad = node.requires_grad || nodes_[in.id()].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(fn);
  return Push(std::move(node));
}

Tensor& Tape::GradOf(std::uint32_t id) {
  Tensor& g = grads_[id];
  if (g.empty() && nodes_[id].value().size() > 0) {
    g = Tensor(nodes_[id].value().shape());
  }
  return g;
}

void Tape::Backward(Var output, std::span<Tensor> leaf_grads) {
  if (output.tape() != this) throw InternalError("output from another tape");
  if (value(output).size() != 1) {
    throw ValidationError("backward needs a scalar output, got " +
                          ShapeString(value(output).shape()));
  }
  grads_.assign(nodes_.size(), Tensor());
  GradOf(output.id()).Fill(1.0);
  last_visits_ = 0;
  for (std::int64_t id = output.id(); id >= 0; --id) {
    const auto uid = static_cast<std::uint32_t>(id);
    Node& node = nodes_[uid];
    if (!node.requires_grad || grads_[uid].empty()) continue;
    if (node.leaf_slot >= 0) {
      Tensor& dst = leaf_grads[static_cast<std::size_t>(node.leaf_slot)];
      const Tensor& src = grads_[uid];
      if (!dst.SameShape(src)) {
        throw InternalError("leaf gradient slot shape " +
                            ShapeString(dst.shape()) + " vs " +
                            ShapeString(src.shape()));
      }
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
      continue;
    }
    if (node.backward) {
      BackwardContext ctx(*this, uid);
      node.backward(ctx);
      ++last_visits_;
    }
  }
  grads_.clear();
}

}  // namespace sdt
