// gtse/nn/ops.h

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

#ifndef GTSE_NN_OPS_H_
#define GTSE_NN_OPS_H_

#include <random>
#include <span>
#include <vector>

#include "gtse/nn/tensor.h"

namespace gtse::nn {

Tensor MatMul(const Tensor &a, const Tensor &b);
/// x * w + bias, bias broadcast over rows (may be undefined).
Tensor Linear(const Tensor &x, const Tensor &w, const Tensor &bias);
Tensor Add(const Tensor &a, const Tensor &b);
Tensor Mul(const Tensor &a, const Tensor &b);
Tensor Scale(const Tensor &a, float s);
Tensor Relu(const Tensor &x);
Tensor Sigmoid(const Tensor &x);
Tensor Tanh(const Tensor &x);

Tensor ConcatCols(const std::vector<Tensor> &parts);
Tensor SliceCols(const Tensor &x, int start, int count);

/// out.row(i) = x.row(index[i]), or zeros where index[i] < 0.
Tensor GatherRows(const Tensor &x, std::vector<int> index);
/// out.row(index[i]) += x.row(i) for index[i] >= 0; out has out_rows rows.
Tensor ScatterAddRows(const Tensor &x, std::vector<int> index, int out_rows);

/// Per-row normalisation over channels with learned gain and bias.
Tensor LayerNorm(const Tensor &x, const Tensor &gain, const Tensor &bias,
                 float eps = 1e-5f);
/// Standardises every column over the rows (zero mean, unit variance).
Tensor StandardizeCols(const Tensor &x, float eps = 1e-5f);
/// 1 x C average over rows.
Tensor MeanRows(const Tensor &x);

/// Inverted dropout; identity when not training or p == 0.
Tensor Dropout(const Tensor &x, float p, bool training, std::mt19937_64 *rng);

/// Sums frame t (row t, K taps) into out[t * stride + k]; returns
/// 1 x ((T - 1) * stride + K).
Tensor OverlapAdd(const Tensor &frames, int stride);

/// Single-direction LSTM over a time-major batch: row t * batch + b holds
/// step t of sequence b. Gate order i, f, g, o. Returns hidden states in
/// the same layout. reverse runs from the last step to the first.
Tensor Lstm(const Tensor &x, int steps, int batch, const Tensor &w_ih,
            const Tensor &w_hh, const Tensor &bias, bool reverse);

/// Negative SI-SDR of a 1 x L estimate against a fixed reference.
Tensor NegSiSdr(const Tensor &estimate, std::span<const double> reference);
/// Binary cross-entropy of a 1 x 1 probability against label y.
Tensor Bce(const Tensor &probability, int y);

/// Copies a 1 x L row out as doubles.
std::vector<double> ToVector(const Tensor &row);

}  // namespace gtse::nn

#endif  // GTSE_NN_OPS_H_
