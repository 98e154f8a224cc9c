// Copyright 2026 The hrt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HRT_NUMERICS_TENSOR_HPP
#define HRT_NUMERICS_TENSOR_HPP

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace hrt {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using Index = Eigen::Index;

namespace detail {

// One vertex of the reverse-mode tape. Leaves have no inputs and no
// propagate function; interior nodes own references to their inputs, so a
// graph lives exactly as long as the tensor at its root.
struct Node {
  Matrix value;
  Matrix grad;  // empty until the first contribution arrives
  bool requires_grad = false;
  // Set on leaves by an optimizer step and cleared by zero_grad(); a
  // backward pass into a stale leaf is a contract violation.
  bool stale = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node& self)> propagate;

  void accumulate(const Matrix& contribution);
};

}  // namespace detail

/// Dense row-major 2-D tensor of doubles with an optional gradient.
/// Scalars are 1x1 and vectors are 1xn; nothing in the model needs rank 3.
/// Copies share the underlying storage (handle semantics); use clone() for
/// an independent leaf.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);

  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor zeros(Index rows, Index cols, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  Index size() const { return node_->value.size(); }
  std::array<Index, 2> shape() const { return {rows(), cols()}; }
  std::string shape_string() const;

  const Matrix& value() const { return node_->value; }
  // Mutable access is for optimizers and initializers acting on leaves.
  Matrix& mutable_value() { return node_->value; }
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool flag) { node_->requires_grad = flag; }
  bool is_leaf() const { return node_->inputs.empty() && !node_->propagate; }

  bool has_grad() const { return node_->grad.size() != 0; }
  // Zero-filled matrix of the value's shape when no gradient has arrived.
  Matrix grad() const;
  void zero_grad();
  void mark_stale() { node_->stale = true; }
  bool stale() const { return node_->stale; }

  bool all_finite() const;

  Tensor clone() const;
  bool same_storage(const Tensor& other) const { return node_ == other.node_; }

  // Used by op implementations.
  static Tensor from_op(Matrix value, std::vector<Tensor> inputs,
                        std::function<void(detail::Node&)> propagate);
  detail::Node& node() const { return *node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend struct BackwardAccess;
};

struct BackwardStats {
  std::size_t nodes_visited = 0;
  std::size_t leaves_reached = 0;
};

/// Reverse-mode sweep from a 1x1 loss. Every node reachable through
/// requires_grad edges is visited once, in reverse topological order, and
/// leaf gradients accumulate additively.
BackwardStats backward(const Tensor& loss);

}  // namespace hrt

#endif  // HRT_NUMERICS_TENSOR_HPP
