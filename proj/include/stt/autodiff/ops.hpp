// Copyright 2026 The STT Tracking Authors. All Rights Reserved.
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

#pragma once

#include "stt/autodiff/tensor.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace stt::ad {

/// One vertex of the computation graph.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  Tensor& ensure_grad();
};

/// Handle to a graph node. Copies share the node.
class Var {
 public:
  Var() = default;
  explicit Var(Tensor value, bool requires_grad = false);
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Tensor& value() const { return node_->value; }
  /// Mutable access for optimizers and initializers; leaves only.
  Tensor& mutable_value() { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_grad() { return node_->ensure_grad(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  std::size_t rows() const { return node_->value.rows(); }
  std::size_t cols() const { return node_->value.cols(); }
  double item() const;

  /// Reverse pass from this node with an all-ones seed. Interior gradients
  /// are reset first; leaf gradients accumulate until zero_grad().
  void backward() const;
  void zero_grad();

  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

inline Var constant(Tensor value) { return Var(std::move(value), false); }
inline Var parameter(Tensor value) { return Var(std::move(value), true); }

/// Disables graph recording on this thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

// Live/padded flags for masked reductions: 1 = live, 0 = padded.
using Mask = std::span<const std::uint8_t>;

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);

// Elementwise with broadcasting: each dimension must match or be 1.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double factor);

Var concat(const std::vector<Var>& parts, int axis);
Var slice(const Var& a, int axis, std::size_t begin, std::size_t end);

Var sum(const Var& a, int axis);
Var mean(const Var& a, int axis);
Var sum_all(const Var& a);

Var relu(const Var& a);
Var sigmoid(const Var& a);
Var softplus(const Var& a);
Var abs(const Var& a);

/// Softmax along `axis`. With a mask (one flag per entry along the axis),
/// padded entries get exactly zero weight; a slice with no live entry
/// produces all zeros.
Var softmax(const Var& a, int axis, std::optional<Mask> mask = std::nullopt);

/// Per-row normalization with learned gain and bias (both 1 x cols).
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);

/// Scaled dot-product attention softmax(q k^T / sqrt(d)) v. `key_mask` has one
/// flag per key row; queries whose keys are all padded output zeros.
Var attention(const Var& q, const Var& k, const Var& v, std::optional<Mask> key_mask = std::nullopt);
/// The attention weight matrix used by attention().
Var attention_weights(const Var& q, const Var& k, std::optional<Mask> key_mask = std::nullopt);

/// Elementwise binary cross-entropy from logits, -(y log s + (1-y) log(1-s)),
/// computed stably as softplus(x) - y x.
Var bce_with_logits(const Var& logits, const Tensor& targets);

}  // namespace stt::ad
