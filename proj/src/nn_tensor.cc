// src/nn_tensor.cc

// Copyright 2026  The gtse authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "gtse/nn/tensor.h"

#include <unordered_set>

#include "gtse/error.h"

namespace gtse::nn {

namespace {
thread_local bool grad_enabled = true;
}

Matrix &Node::GradBuffer() {
  if (grad.rows() != value.rows() || grad.cols() != value.cols())
    grad = Matrix::Zero(value.rows(), value.cols());
  return grad;
}

void Node::AccumulateGrad(const Matrix &g) {
  if (grad.rows() != value.rows() || grad.cols() != value.cols())
    grad = g;
  else
    grad += g;
}

Tensor::Tensor(Matrix value, bool requires_grad)
    : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
}

bool GradEnabled() { return grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

Tensor MakeResult(Matrix value, std::vector<Tensor> inputs,
                  std::function<void(Node &)> backward) {
  Tensor out(std::move(value));
  if (!grad_enabled) return out;
  bool any = false;
  for (const Tensor &t : inputs) any = any || t.requires_grad();
  if (!any) return out;
  Node *n = out.node();
  n->requires_grad = true;
  for (Tensor &t : inputs) n->inputs.push_back(t.shared());
  n->backward = std::move(backward);
  return out;
}

void Backward(const Tensor &loss) {
  GTSE_REQUIRE(loss.defined() && loss.rows() == 1 && loss.cols() == 1,
               "backward needs a scalar output");
  if (!loss.requires_grad()) return;

  // iterative post-order DFS
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, size_t>> stack{{loss.node(), 0}};
  seen.insert(loss.node());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node *child = node->inputs[next++].get();
      if (child->requires_grad && !seen.count(child)) {
        seen.insert(child);
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  loss.node()->AccumulateGrad(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (n->backward && n->grad.size() > 0) n->backward(*n);
  }
}

}  // namespace gtse::nn
