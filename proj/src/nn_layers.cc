// src/nn_layers.cc

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

#include "gtse/nn/layers.h"

#include <cmath>

#include "gtse/error.h"

namespace gtse::nn {

Tensor ParameterList::Create(const std::string &name, int rows, int cols,
                             float bound, std::mt19937_64 *rng) {
  std::uniform_real_distribution<float> u(-bound, bound);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(*rng);
  items_.push_back({name, Tensor(std::move(m), true)});
  return items_.back().tensor;
}

Tensor ParameterList::CreateConstant(const std::string &name, int rows, int cols,
                                     float value) {
  items_.push_back({name, Tensor(Matrix::Constant(rows, cols, value), true)});
  return items_.back().tensor;
}

void ParameterList::ZeroGrad() {
  for (NamedParameter &p : items_) p.tensor.ZeroGrad();
}

size_t ParameterList::NumScalars() const {
  size_t n = 0;
  for (const NamedParameter &p : items_) n += p.tensor.value().size();
  return n;
}

LinearLayer::LinearLayer(ParameterList *params, const std::string &name, int in,
                         int out, bool bias, std::mt19937_64 *rng) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(in));
  weight_ = params->Create(name + ".weight", in, out, bound, rng);
  if (bias) bias_ = params->Create(name + ".bias", 1, out, bound, rng);
}

LayerNormLayer::LayerNormLayer(ParameterList *params, const std::string &name,
                               int dim) {
  gain_ = params->CreateConstant(name + ".gain", 1, dim, 1.0f);
  bias_ = params->CreateConstant(name + ".bias", 1, dim, 0.0f);
}

BiLstmLayer::BiLstmLayer(ParameterList *params, const std::string &name, int in,
                         int hidden, std::mt19937_64 *rng) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(hidden));
  fw_ih_ = params->Create(name + ".fw.w_ih", in, 4 * hidden, bound, rng);
  fw_hh_ = params->Create(name + ".fw.w_hh", hidden, 4 * hidden, bound, rng);
  fw_b_ = params->Create(name + ".fw.bias", 1, 4 * hidden, bound, rng);
  bw_ih_ = params->Create(name + ".bw.w_ih", in, 4 * hidden, bound, rng);
  bw_hh_ = params->Create(name + ".bw.w_hh", hidden, 4 * hidden, bound, rng);
  bw_b_ = params->Create(name + ".bw.bias", 1, 4 * hidden, bound, rng);
}

Tensor BiLstmLayer::Forward(const Tensor &x, int steps, int batch) const {
  Tensor fw = Lstm(x, steps, batch, fw_ih_, fw_hh_, fw_b_, false);
  Tensor bw = Lstm(x, steps, batch, bw_ih_, bw_hh_, bw_b_, true);
  return ConcatCols({fw, bw});
}

BiLstmStack::BiLstmStack(ParameterList *params, const std::string &name, int in,
                         int hidden, int layers, float dropout,
                         std::mt19937_64 *rng)
    : dropout_(dropout) {
  GTSE_REQUIRE(layers >= 1, "a recurrent stack needs at least one layer");
  GTSE_REQUIRE(dropout >= 0.0f && dropout < 1.0f, "dropout must be in [0, 1)");
  for (int l = 0; l < layers; ++l)
    layers_.emplace_back(params, name + ".l" + std::to_string(l),
                         l == 0 ? in : 2 * hidden, hidden, rng);
}

Tensor BiLstmStack::Forward(const Tensor &x, const ForwardContext &ctx) const {
  const int steps = static_cast<int>(x.rows());
  Tensor h = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    if (l > 0) h = Dropout(h, dropout_, ctx.training, ctx.rng);
    h = layers_[l].Forward(h, steps, 1);
  }
  return h;
}

}  // namespace gtse::nn
