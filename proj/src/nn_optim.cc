// src/nn_optim.cc

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

#include "gtse/nn/optim.h"

#include <cmath>

#include "gtse/error.h"

namespace gtse::nn {

Adam::Adam(ParameterList *params, Options opts) : params_(params), opts_(opts) {
  for (const NamedParameter &p : params_->items()) {
    m_.push_back(Matrix::Zero(p.tensor.rows(), p.tensor.cols()));
    v_.push_back(Matrix::Zero(p.tensor.rows(), p.tensor.cols()));
  }
}

double Adam::Step(double grad_scale) {
  auto &items = params_->items();
  GTSE_REQUIRE(items.size() == m_.size(),
               "parameter list changed after the optimizer was built");
  double sq = 0.0;
  for (const NamedParameter &p : items)
    if (p.tensor.grad().size() > 0)
      sq += p.tensor.grad().cast<double>().squaredNorm();
  const double norm = std::sqrt(sq) * grad_scale;
  if (!std::isfinite(norm))
    Fail(ErrorKind::kDiverged, "non-finite gradient norm");
  double scale = grad_scale;
  if (opts_.clip_norm > 0.0 && norm > opts_.clip_norm)
    scale *= opts_.clip_norm / norm;

  ++steps_;
  const double c1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(steps_));
  const float step = static_cast<float>(opts_.lr * std::sqrt(c2) / c1);
  const float b1 = static_cast<float>(opts_.beta1);
  const float b2 = static_cast<float>(opts_.beta2);
  const float eps = static_cast<float>(opts_.eps * std::sqrt(c2));
  for (size_t i = 0; i < items.size(); ++i) {
    const Matrix &g = items[i].tensor.grad();
    if (g.size() == 0) continue;
    const Matrix gs = g * static_cast<float>(scale);
    m_[i] = b1 * m_[i] + (1.0f - b1) * gs;
    v_[i] = b2 * v_[i] + (1.0f - b2) * gs.cwiseProduct(gs);
    items[i].tensor.mutable_value().array() -=
        step * m_[i].array() / (v_[i].array().sqrt() + eps);
  }
  return norm;
}

}  // namespace gtse::nn
