// gtse/nn/optim.h

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

#ifndef GTSE_NN_OPTIM_H_
#define GTSE_NN_OPTIM_H_

#include <vector>

#include "gtse/nn/layers.h"

namespace gtse::nn {

/// Adam with optional global-norm gradient clipping. Moments are indexed in
/// parameter-list order so they can be persisted next to the weights.
class Adam {
 public:
  struct Options {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 5.0;  // <= 0 disables clipping
  };

  Adam(ParameterList *params, Options opts);

  /// Applies one update from the accumulated gradients, scaled by
  /// grad_scale first (e.g. 1/batch). Returns the pre-clip global norm.
  double Step(double grad_scale = 1.0);

  void set_lr(double lr) { opts_.lr = lr; }
  double lr() const { return opts_.lr; }
  long step_count() const { return steps_; }

  std::vector<Matrix> &first_moments() { return m_; }
  std::vector<Matrix> &second_moments() { return v_; }
  void set_step_count(long n) { steps_ = n; }

 private:
  ParameterList *params_;
  Options opts_;
  std::vector<Matrix> m_, v_;
  long steps_ = 0;
};

}  // namespace gtse::nn

#endif  // GTSE_NN_OPTIM_H_
