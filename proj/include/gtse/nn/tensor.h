// gtse/nn/tensor.h

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

#ifndef GTSE_NN_TENSOR_H_
#define GTSE_NN_TENSOR_H_

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace gtse::nn {

using Matrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows back
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node &)> backward;

  /// Zero-initialised gradient buffer of the value's shape.
  Matrix &GradBuffer();
  void AccumulateGrad(const Matrix &g);
};

/// Handle to a node in a dynamically built computation graph. Copies share
/// the node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Matrix value, bool requires_grad = false);

  const Matrix &value() const { return node_->value; }
  Matrix &mutable_value() { return node_->value; }
  const Matrix &grad() const { return node_->grad; }
  void ZeroGrad() { node_->grad.resize(0, 0); }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  bool defined() const { return node_ != nullptr; }
  float item() const { return node_->value(0, 0); }

  Node *node() const { return node_.get(); }
  const std::shared_ptr<Node> &shared() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// True unless a NoGradGuard is alive on this thread.
bool GradEnabled();

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool previous_;
};

/// Creates an op result. The backward closure is attached only when grad
/// mode is on and some input needs a gradient.
Tensor MakeResult(Matrix value, std::vector<Tensor> inputs,
                  std::function<void(Node &)> backward);

/// Reverse-mode sweep from a scalar (1x1) output, seeded with 1.
void Backward(const Tensor &loss);

}  // namespace gtse::nn

#endif  // GTSE_NN_TENSOR_H_
