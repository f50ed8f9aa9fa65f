// Copyright 2026 The protoaudio Authors.
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

// Reverse-mode differentiation on an append-only tape.
//
// Every op appends one node holding its forward value, the ids of its inputs
// and a closure that scatters the node's output gradient into its inputs.
// Inputs always precede their consumers, so a single reverse sweep over the
// node list is a valid topological order.

#ifndef PROTOAUDIO_DIFF_TAPE_HPP_
#define PROTOAUDIO_DIFF_TAPE_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "protoaudio/diff/tensor.hpp"
#include "protoaudio/error.hpp"

namespace protoaudio::diff {

template <typename T>
class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
template <typename T>
class Var {
 public:
  Var() = default;
  Var(const Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor<T>& value() const { return tape_->value(id_); }
  const Shape& shape() const { return value().shape; }
  std::size_t size() const { return value().size(); }
  std::size_t id() const { return id_; }
  bool requires_grad() const { return tape_->requires_grad(id_); }
  Tape<T>& tape() const { return const_cast<Tape<T>&>(*tape_); }
  const Tape<T>* tape_ptr() const { return tape_; }

 private:
  const Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Gradients of requires_grad leaves, keyed by node id.
template <typename T>
class Gradients {
 public:
  bool contains(const Var<T>& v) const { return grads_.contains(v.id()); }
  const Tensor<T>& operator[](const Var<T>& v) const {
    auto it = grads_.find(v.id());
    if (it == grads_.end()) {
      throw Error(ErrorKind::kShapeMismatch,
                  "no gradient recorded for node " + std::to_string(v.id()));
    }
    return it->second;
  }
  Tensor<T>& mutable_at(std::size_t id) { return grads_.at(id); }
  std::size_t size() const { return grads_.size(); }

 private:
  friend class Tape<T>;
  std::unordered_map<std::size_t, Tensor<T>> grads_;
};

template <typename T>
class Tape {
 public:
  // input_grads[i] is the accumulator for input i, or nullptr when that input
  // does not require a gradient.
  using InputGrads = std::vector<Tensor<T>*>;
  using BackwardFn = std::function<void(const Tensor<T>& grad_out, InputGrads& input_grads)>;

  // In checked mode every recorded value and gradient is scanned for NaN/Inf.
  explicit Tape(bool checked = false) : checked_(checked) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> Leaf(Tensor<T> value, bool requires_grad) {
    CheckFinite("leaf", value);
    Node node;
    node.value = std::move(value);
    node.requires_grad = requires_grad;
    node.is_leaf = true;
    nodes_.push_back(std::move(node));
    return Var<T>(this, nodes_.size() - 1);
  }

  Var<T> Constant(Tensor<T> value) { return Leaf(std::move(value), false); }

  Var<T> Record(std::string_view op, Tensor<T> value, std::vector<Var<T>> inputs,
                BackwardFn backward) {
    CheckFinite(op, value);
    Node node;
    node.value = std::move(value);
    node.op = op;
    for (const Var<T>& in : inputs) {
      if (in.tape_ptr() != this) {
        throw Error(ErrorKind::kShapeMismatch,
                    std::string(op) + ": input recorded on a different tape");
      }
      node.inputs.push_back(in.id());
      node.requires_grad = node.requires_grad || nodes_[in.id()].requires_grad;
    }
    if (node.requires_grad) node.backward = std::move(backward);
    nodes_.push_back(std::move(node));
    return Var<T>(this, nodes_.size() - 1);
  }

  Gradients<T> Backward(const Var<T>& loss) {
    if (loss.size() != 1) {
      throw Error(ErrorKind::kNonScalarLoss,
                  "backward needs a scalar loss, got shape " + ShapeString(loss.shape()));
    }
    std::vector<std::optional<Tensor<T>>> grads(nodes_.size());
    if (nodes_[loss.id()].requires_grad) {
      grads[loss.id()] = Tensor<T>(loss.shape(), T(1));
    }
    for (std::size_t id = loss.id() + 1; id-- > 0;) {
      Node& node = nodes_[id];
      if (!grads[id] || node.is_leaf || !node.backward) continue;
      CheckFinite(node.op, *grads[id]);
      InputGrads input_grads(node.inputs.size(), nullptr);
      for (std::size_t i = 0; i < node.inputs.size(); ++i) {
        const std::size_t in = node.inputs[i];
        if (!nodes_[in].requires_grad) continue;
        if (!grads[in]) grads[in] = Tensor<T>(nodes_[in].value.shape, T(0));
        input_grads[i] = &*grads[in];
      }
      node.backward(*grads[id], input_grads);
      grads[id].reset();
    }

    Gradients<T> out;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      const Node& node = nodes_[id];
      if (!node.is_leaf || !node.requires_grad) continue;
      Tensor<T> g = grads[id] ? std::move(*grads[id]) : Tensor<T>(node.value.shape, T(0));
      CheckFinite("leaf gradient", g);
      out.grads_.emplace(id, std::move(g));
    }
    return out;
  }

  const Tensor<T>& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }
  bool checked() const { return checked_; }

 private:
  struct Node {
    Tensor<T> value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    std::string_view op = "leaf";
    bool requires_grad = false;
    bool is_leaf = false;
  };

  void CheckFinite(std::string_view op, const Tensor<T>& t) const {
    if (!checked_) return;
    for (T v : t.data) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::kNonFiniteValue,
                    "non-finite value produced by " + std::string(op));
      }
    }
  }

  std::vector<Node> nodes_;
  bool checked_;
};

}  // namespace protoaudio::diff

#endif  // PROTOAUDIO_DIFF_TAPE_HPP_
