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

#include "hrt/numerics/tensor.hpp"

#include <unordered_set>
#include <utility>

#include "hrt/errors.hpp"

namespace hrt {

namespace detail {

void Node::accumulate(const Matrix& contribution) {
  if (!requires_grad) return;
  if (grad.size() == 0) {
    grad = contribution;
  } else {
    grad += contribution;
  }
}

}  // namespace detail

Tensor::Tensor(Matrix value, bool requires_grad)
    : node_(std::make_shared<detail::Node>()) {
  if (value.size() == 0) {
    throw DimensionError("tensor dimensions must be positive");
  }
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  Matrix m(1, 1);
  m(0, 0) = value;
  return Tensor(std::move(m), requires_grad);
}

Tensor Tensor::zeros(Index rows, Index cols, bool requires_grad) {
  return Tensor(Matrix::Zero(rows, cols), requires_grad);
}

std::string Tensor::shape_string() const {
  return "[" + std::to_string(rows()) + "x" + std::to_string(cols()) + "]";
}

double Tensor::item() const {
  if (size() != 1) {
    throw DimensionError("item() on non-scalar tensor " + shape_string());
  }
  return node_->value(0, 0);
}

Matrix Tensor::grad() const {
  if (has_grad()) return node_->grad;
  return Matrix::Zero(rows(), cols());
}

void Tensor::zero_grad() {
  node_->grad.resize(0, 0);
  node_->stale = false;
}

bool Tensor::all_finite() const {
  if (!node_->value.allFinite()) return false;
  return !has_grad() || node_->grad.allFinite();
}

Tensor Tensor::clone() const {
  return Tensor(node_->value, node_->requires_grad);
}

Tensor Tensor::from_op(Matrix value, std::vector<Tensor> inputs,
                       std::function<void(detail::Node&)> propagate) {
  auto node = std::make_shared<detail::Node>();
  node->value = std::move(value);
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (any) {
    node->requires_grad = true;
    node->inputs.reserve(inputs.size());
    for (auto& in : inputs) node->inputs.push_back(in.node_);
    node->propagate = std::move(propagate);
  }
  return Tensor(std::move(node));
}

struct BackwardAccess {
  static const std::shared_ptr<detail::Node>& node(const Tensor& t) { return t.node_; }
};

BackwardStats backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ContractError("backward() requires a scalar loss, got " +
                        (loss.defined() ? loss.shape_string() : std::string("<undefined>")));
  }
  if (!loss.requires_grad()) {
    throw ContractError("backward() on a loss that does not depend on any trainable tensor");
  }

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  detail::Node* root = BackwardAccess::node(loss).get();
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      detail::Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  BackwardStats stats;
  for (detail::Node* node : order) {
    if (node->inputs.empty()) {
      if (node->stale) {
        throw ContractError(
            "backward() into a parameter whose gradient was not zeroed after the last "
            "optimizer step");
      }
    } else {
      node->grad.resize(0, 0);  // interior grads never carry over between sweeps
    }
  }

  if (root->inputs.empty()) {
    root->accumulate(Matrix::Ones(1, 1));
  } else {
    root->grad = Matrix::Ones(1, 1);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* node = *it;
    ++stats.nodes_visited;
    if (node->inputs.empty()) {
      ++stats.leaves_reached;
      continue;
    }
    if (node->grad.size() == 0) continue;  // no path carried gradient here
    node->propagate(*node);
    if (node != root) node->grad.resize(0, 0);
  }
  return stats;
}

}  // namespace hrt
