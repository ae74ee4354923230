// gtse/nn/layers.h

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

#ifndef GTSE_NN_LAYERS_H_
#define GTSE_NN_LAYERS_H_

#include <random>
#include <string>
#include <vector>

#include "gtse/nn/ops.h"

namespace gtse::nn {

struct NamedParameter {
  std::string name;
  Tensor tensor;
};

/// Ordered collection of trainable tensors; the order fixes the checkpoint
/// layout and the optimiser state.
class ParameterList {
 public:
  Tensor Create(const std::string &name, int rows, int cols, float bound,
                std::mt19937_64 *rng);
  Tensor CreateConstant(const std::string &name, int rows, int cols, float value);

  const std::vector<NamedParameter> &items() const { return items_; }
  std::vector<NamedParameter> &items() { return items_; }
  void ZeroGrad();
  size_t NumScalars() const;

 private:
  std::vector<NamedParameter> items_;
};

/// Per-forward switches: training enables dropout, which draws from rng.
struct ForwardContext {
  bool training = false;
  std::mt19937_64 *rng = nullptr;
};

class LinearLayer {
 public:
  LinearLayer() = default;
  LinearLayer(ParameterList *params, const std::string &name, int in, int out,
              bool bias, std::mt19937_64 *rng);
  Tensor Forward(const Tensor &x) const { return Linear(x, weight_, bias_); }
  int in() const { return static_cast<int>(weight_.rows()); }
  int out() const { return static_cast<int>(weight_.cols()); }

 private:
  Tensor weight_, bias_;
};

class LayerNormLayer {
 public:
  LayerNormLayer() = default;
  LayerNormLayer(ParameterList *params, const std::string &name, int dim);
  Tensor Forward(const Tensor &x) const { return LayerNorm(x, gain_, bias_); }

 private:
  Tensor gain_, bias_;
};

/// Bidirectional LSTM; output concatenates forward and backward states
/// (2 * hidden channels).
class BiLstmLayer {
 public:
  BiLstmLayer() = default;
  BiLstmLayer(ParameterList *params, const std::string &name, int in, int hidden,
              std::mt19937_64 *rng);
  Tensor Forward(const Tensor &x, int steps, int batch) const;
  int hidden() const { return static_cast<int>(fw_hh_.rows()); }

 private:
  Tensor fw_ih_, fw_hh_, fw_b_, bw_ih_, bw_hh_, bw_b_;
};

/// Stack of bidirectional layers with dropout between layers.
class BiLstmStack {
 public:
  BiLstmStack() = default;
  BiLstmStack(ParameterList *params, const std::string &name, int in, int hidden,
              int layers, float dropout, std::mt19937_64 *rng);
  /// x is steps x in for a single sequence.
  Tensor Forward(const Tensor &x, const ForwardContext &ctx) const;
  int out_channels() const { return 2 * layers_.front().hidden(); }

 private:
  std::vector<BiLstmLayer> layers_;
  float dropout_ = 0.0f;
};

}  // namespace gtse::nn

#endif  // GTSE_NN_LAYERS_H_
