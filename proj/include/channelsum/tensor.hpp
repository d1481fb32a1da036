// Copyright 2026 The channelsum Authors.
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

// Dense tensors with define-by-run reverse-mode differentiation.
//
// A Tensor is a cheap handle to a shared Node. Every op builds a fresh Node
// whose parents are its inputs, so the graph lives exactly as long as the
// handles that reach it. Leaves created with requires_grad accumulate
// gradients across Backward() calls until ZeroGrad(); interior nodes are
// reset at the start of each Backward().
//
// Values are held in 64-bit floats. Model parameters are kept representable
// in 32 bits by the optimizer (see adam.hpp), which is also the precision
// they are stored at in checkpoints.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace channelsum::ad {

using Shape = std::vector<std::size_t>;

std::size_t NumElements(const Shape& shape);
std::string ShapeToString(const Shape& shape);

struct Node;
using BackwardFn = std::function<void(Node& self)>;

struct Node {
  const char* op = "leaf";
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first touched
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  BackwardFn backward;

  // Allocates (zero-filled) on first use.
  std::vector<double>& grad_buffer();
};

class Tensor {
 public:
  Tensor() = default;

  static Tensor Constant(Shape shape, std::vector<double> values);
  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Scalar(double value);
  static Tensor Parameter(Shape shape, std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t numel() const { return node_->value.size(); }
  bool requires_grad() const { return node_->requires_grad; }

  std::span<const double> values() const { return node_->value; }
  // Direct write access for parameter updates and finite differences.
  std::span<double> mutable_values() { return node_->value; }
  double item() const;
  double at(std::size_t i) const { return node_->value.at(i); }

  // Zeros when no gradient has been accumulated yet.
  std::vector<double> grad() const;
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<double> mutable_grad() { return node_->grad_buffer(); }
  void ZeroGrad();

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared_node() const { return node_; }

  // Extension point for ops outside this file. `backward` receives the output
  // node and must accumulate into the parents' grad buffers.
  static Tensor MakeOp(const char* op, Shape shape, std::vector<double> value,
                       std::vector<Tensor> parents, BackwardFn backward);

 private:
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

// Populates gradients of every requires_grad node reachable from `loss`.
// Throws kNotScalar unless loss has exactly one element.
void Backward(const Tensor& loss);

// While alive, ops on this thread record no graph edges.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};
bool GradEnabled();

// When enabled, every op verifies its output is finite and throws
// kNonFiniteValue otherwise. Defaults to on in debug builds.
void SetFiniteChecks(bool enabled);
bool FiniteChecks();

// (m,k)@(k,n) -> (m,n); (k)@(k,n) -> (n); (m,k)@(k) -> (m).
Tensor MatMul(const Tensor& a, const Tensor& b);
// Elementwise; a rank-0 operand broadcasts, any other mismatch throws.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double factor);
// Ranks must agree; rank 1 supports axis 0, rank 2 axes 0 and 1.
Tensor Concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor Reshape(const Tensor& a, Shape shape);
// Rank-1 tensors of equal length -> (count, length).
Tensor StackRows(const std::vector<Tensor>& rows);
Tensor Row(const Tensor& matrix, std::size_t index);
Tensor GatherRows(const Tensor& table, std::span<const std::int32_t> ids);
Tensor Sigmoid(const Tensor& a);
Tensor Tanh(const Tensor& a);
Tensor Relu(const Tensor& a);
// Over the last axis of a rank-1 or rank-2 tensor.
Tensor Softmax(const Tensor& a);
// Inverted dropout; identity when !training or p == 0.
Tensor Dropout(const Tensor& a, double p, bool training, std::mt19937_64& rng);
Tensor Sum(const Tensor& a);
Tensor Log(const Tensor& a);
// Gradient passes only where lo < x < hi.
Tensor Clamp(const Tensor& a, double lo, double hi);
// Zero gradient at the origin.
Tensor FrobeniusNorm(const Tensor& a);
Tensor Transpose(const Tensor& a);
Tensor Outer(const Tensor& a, const Tensor& b);

}  // namespace channelsum::ad
