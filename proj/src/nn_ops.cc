// src/nn_ops.cc

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

#include "gtse/nn/ops.h"

#include <cmath>

#include "gtse/error.h"
#include "gtse/objectives.h"

namespace gtse::nn {

namespace {

Node &In(Node &n, size_t i) { return *n.inputs[i]; }

}  // namespace

Tensor MatMul(const Tensor &a, const Tensor &b) {
  GTSE_REQUIRE(a.cols() == b.rows(), "matmul shape mismatch ", a.rows(), "x",
               a.cols(), " * ", b.rows(), "x", b.cols());
  Matrix out = a.value() * b.value();
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    Node &a = In(n, 0), &b = In(n, 1);
    if (a.requires_grad) a.GradBuffer().noalias() += n.grad * b.value.transpose();
    if (b.requires_grad) b.GradBuffer().noalias() += a.value.transpose() * n.grad;
  });
}

Tensor Linear(const Tensor &x, const Tensor &w, const Tensor &bias) {
  GTSE_REQUIRE(x.cols() == w.rows(), "linear input has ", x.cols(),
               " channels, weight expects ", w.rows());
  Matrix out = x.value() * w.value();
  if (bias.defined()) out.rowwise() += bias.value().row(0);
  std::vector<Tensor> inputs{x, w};
  if (bias.defined()) inputs.push_back(bias);
  return MakeResult(std::move(out), std::move(inputs), [](Node &n) {
    Node &x = In(n, 0), &w = In(n, 1);
    if (x.requires_grad) x.GradBuffer().noalias() += n.grad * w.value.transpose();
    if (w.requires_grad) w.GradBuffer().noalias() += x.value.transpose() * n.grad;
    if (n.inputs.size() > 2 && In(n, 2).requires_grad)
      In(n, 2).GradBuffer() += n.grad.colwise().sum();
  });
}

Tensor Add(const Tensor &a, const Tensor &b) {
  GTSE_REQUIRE(a.rows() == b.rows() && a.cols() == b.cols(), "add shape mismatch");
  return MakeResult(a.value() + b.value(), {a, b}, [](Node &n) {
    for (auto &in : n.inputs)
      if (in->requires_grad) in->AccumulateGrad(n.grad);
  });
}

Tensor Mul(const Tensor &a, const Tensor &b) {
  GTSE_REQUIRE(a.rows() == b.rows() && a.cols() == b.cols(), "mul shape mismatch");
  Matrix out = a.value().cwiseProduct(b.value());
  return MakeResult(std::move(out), {a, b}, [](Node &n) {
    Node &a = In(n, 0), &b = In(n, 1);
    if (a.requires_grad) a.GradBuffer() += n.grad.cwiseProduct(b.value);
    if (b.requires_grad) b.GradBuffer() += n.grad.cwiseProduct(a.value);
  });
}

Tensor Scale(const Tensor &a, float s) {
  return MakeResult(a.value() * s, {a}, [s](Node &n) {
    In(n, 0).GradBuffer() += n.grad * s;
  });
}

Tensor Relu(const Tensor &x) {
  Matrix out = x.value().cwiseMax(0.0f);
  return MakeResult(std::move(out), {x}, [](Node &n) {
    In(n, 0).GradBuffer().array() +=
        n.grad.array() * (n.value.array() > 0.0f).cast<float>();
  });
}

Tensor Sigmoid(const Tensor &x) {
  Matrix out = (1.0f / (1.0f + (-x.value().array()).exp())).matrix();
  return MakeResult(std::move(out), {x}, [](Node &n) {
    In(n, 0).GradBuffer().array() +=
        n.grad.array() * n.value.array() * (1.0f - n.value.array());
  });
}

Tensor Tanh(const Tensor &x) {
  Matrix out = x.value().array().tanh().matrix();
  return MakeResult(std::move(out), {x}, [](Node &n) {
    In(n, 0).GradBuffer().array() +=
        n.grad.array() * (1.0f - n.value.array().square());
  });
}

Tensor ConcatCols(const std::vector<Tensor> &parts) {
  GTSE_REQUIRE(!parts.empty(), "concat of nothing");
  Eigen::Index rows = parts[0].rows(), cols = 0;
  for (const Tensor &p : parts) {
    GTSE_REQUIRE(p.rows() == rows, "concat row mismatch: ", p.rows(), " vs ", rows);
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const Tensor &p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return MakeResult(std::move(out), parts, [](Node &n) {
    Eigen::Index c = 0;
    for (auto &in : n.inputs) {
      const Eigen::Index w = in->value.cols();
      if (in->requires_grad) in->GradBuffer() += n.grad.middleCols(c, w);
      c += w;
    }
  });
}

Tensor SliceCols(const Tensor &x, int start, int count) {
  GTSE_REQUIRE(start >= 0 && count >= 0 && start + count <= x.cols(),
               "column slice out of range");
  Matrix out = x.value().middleCols(start, count);
  return MakeResult(std::move(out), {x}, [start, count](Node &n) {
    In(n, 0).GradBuffer().middleCols(start, count) += n.grad;
  });
}

Tensor GatherRows(const Tensor &x, std::vector<int> index) {
  const Eigen::Index cols = x.cols();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(index.size()), cols);
  for (size_t i = 0; i < index.size(); ++i) {
    GTSE_REQUIRE(index[i] < x.rows(), "gather index out of range");
    if (index[i] >= 0) out.row(i) = x.value().row(index[i]);
  }
  return MakeResult(std::move(out), {x}, [index = std::move(index)](Node &n) {
    Matrix &g = In(n, 0).GradBuffer();
    for (size_t i = 0; i < index.size(); ++i)
      if (index[i] >= 0) g.row(index[i]) += n.grad.row(i);
  });
}

Tensor ScatterAddRows(const Tensor &x, std::vector<int> index, int out_rows) {
  GTSE_REQUIRE(static_cast<Eigen::Index>(index.size()) == x.rows(),
               "scatter index size mismatch");
  Matrix out = Matrix::Zero(out_rows, x.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    GTSE_REQUIRE(index[i] < out_rows, "scatter index out of range");
    if (index[i] >= 0) out.row(index[i]) += x.value().row(i);
  }
  return MakeResult(std::move(out), {x}, [index = std::move(index)](Node &n) {
    Matrix &g = In(n, 0).GradBuffer();
    for (size_t i = 0; i < index.size(); ++i)
      if (index[i] >= 0) g.row(i) += n.grad.row(index[i]);
  });
}

Tensor LayerNorm(const Tensor &x, const Tensor &gain, const Tensor &bias,
                 float eps) {
  const Eigen::Index rows = x.rows(), cols = x.cols();
  GTSE_REQUIRE(gain.cols() == cols && bias.cols() == cols,
               "layer norm parameter width mismatch");
  Matrix xhat(rows, cols);
  Eigen::VectorXf inv_std(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const float mu = x.value().row(r).mean();
    auto centered = x.value().row(r).array() - mu;
    const float var = centered.square().mean();
    inv_std(r) = 1.0f / std::sqrt(var + eps);
    xhat.row(r) = (centered * inv_std(r)).matrix();
  }
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  out.rowwise() += bias.value().row(0);
  return MakeResult(
      std::move(out), {x, gain, bias},
      [xhat = std::move(xhat), inv_std = std::move(inv_std)](Node &n) {
        Node &x = In(n, 0), &g = In(n, 1), &b = In(n, 2);
        if (g.requires_grad)
          g.GradBuffer() += n.grad.cwiseProduct(xhat).colwise().sum();
        if (b.requires_grad) b.GradBuffer() += n.grad.colwise().sum();
        if (!x.requires_grad) return;
        Matrix &gx = x.GradBuffer();
        const auto gain = g.value.row(0).array();
        for (Eigen::Index r = 0; r < n.grad.rows(); ++r) {
          Eigen::ArrayXf dxhat = (n.grad.row(r).array() * gain).transpose();
          Eigen::ArrayXf xh = xhat.row(r).array().transpose();
          const float m1 = dxhat.mean(), m2 = (dxhat * xh).mean();
          gx.row(r).array() += ((dxhat - m1 - xh * m2) * inv_std(r)).transpose();
        }
      });
}

Tensor StandardizeCols(const Tensor &x, float eps) {
  const Eigen::Index rows = x.rows();
  const Eigen::RowVectorXf mu = x.value().colwise().mean();
  Matrix centered = x.value().rowwise() - mu;
  const Eigen::RowVectorXf inv_std =
      ((centered.array().square().colwise().sum() / static_cast<float>(rows)) + eps)
          .rsqrt()
          .matrix();
  Matrix out = (centered.array().rowwise() * inv_std.array()).matrix();
  Matrix y = out;
  return MakeResult(std::move(out), {x}, [y = std::move(y), inv_std](Node &n) {
    const float inv_rows = 1.0f / static_cast<float>(n.grad.rows());
    const Eigen::RowVectorXf m1 = n.grad.colwise().sum() * inv_rows;
    const Eigen::RowVectorXf m2 = n.grad.cwiseProduct(y).colwise().sum() * inv_rows;
    Matrix g = n.grad.rowwise() - m1;
    g.array() -= y.array().rowwise() * m2.array();
    In(n, 0).GradBuffer().array() += g.array().rowwise() * inv_std.array();
  });
}

Tensor MeanRows(const Tensor &x) {
  Matrix out = x.value().colwise().mean();
  return MakeResult(std::move(out), {x}, [](Node &n) {
    Matrix &g = In(n, 0).GradBuffer();
    const float inv = 1.0f / static_cast<float>(g.rows());
    g.rowwise() += n.grad.row(0) * inv;
  });
}

Tensor Dropout(const Tensor &x, float p, bool training, std::mt19937_64 *rng) {
  if (!training || p <= 0.0f) return x;
  GTSE_REQUIRE(p < 1.0f && rng != nullptr, "dropout needs p < 1 and an RNG");
  std::bernoulli_distribution keep(1.0 - p);
  Matrix mask(x.rows(), x.cols());
  const float s = 1.0f / (1.0f - p);
  for (Eigen::Index i = 0; i < mask.size(); ++i)
    mask.data()[i] = keep(*rng) ? s : 0.0f;
  Matrix out = x.value().cwiseProduct(mask);
  return MakeResult(std::move(out), {x}, [mask = std::move(mask)](Node &n) {
    In(n, 0).GradBuffer() += n.grad.cwiseProduct(mask);
  });
}

Tensor OverlapAdd(const Tensor &frames, int stride) {
  const Eigen::Index t = frames.rows(), k = frames.cols();
  GTSE_REQUIRE(t >= 1 && stride >= 1, "overlap-add needs frames and a stride");
  const Eigen::Index len = (t - 1) * stride + k;
  Matrix out = Matrix::Zero(1, len);
  for (Eigen::Index i = 0; i < t; ++i)
    out.middleCols(i * stride, k) += frames.value().row(i);
  return MakeResult(std::move(out), {frames}, [stride](Node &n) {
    Matrix &g = In(n, 0).GradBuffer();
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      g.row(i) += n.grad.middleCols(i * stride, g.cols());
  });
}

Tensor Lstm(const Tensor &x, int steps, int batch, const Tensor &w_ih,
            const Tensor &w_hh, const Tensor &bias, bool reverse) {
  const Eigen::Index hidden = w_hh.rows();
  GTSE_REQUIRE(x.rows() == static_cast<Eigen::Index>(steps) * batch,
               "LSTM input has ", x.rows(), " rows, expected ", steps, "x", batch);
  GTSE_REQUIRE(w_ih.rows() == x.cols() && w_ih.cols() == 4 * hidden &&
                   w_hh.cols() == 4 * hidden && bias.cols() == 4 * hidden,
               "LSTM weight shapes inconsistent");
  const Eigen::Index h4 = 4 * hidden;

  Matrix gates = x.value() * w_ih.value();
  gates.rowwise() += bias.value().row(0);
  Matrix h(x.rows(), hidden), c(x.rows(), hidden), tanh_c(x.rows(), hidden);
  for (int s = 0; s < steps; ++s) {
    const int t = reverse ? steps - 1 - s : s;
    const int prev = reverse ? t + 1 : t - 1;
    auto g = gates.middleRows(static_cast<Eigen::Index>(t) * batch, batch);
    if (s > 0)
      g.noalias() +=
          h.middleRows(static_cast<Eigen::Index>(prev) * batch, batch) * w_hh.value();
    g.leftCols(2 * hidden) =
        (1.0f / (1.0f + (-g.leftCols(2 * hidden).array()).exp())).matrix();
    g.middleCols(2 * hidden, hidden) =
        g.middleCols(2 * hidden, hidden).array().tanh().matrix();
    g.rightCols(hidden) =
        (1.0f / (1.0f + (-g.rightCols(hidden).array()).exp())).matrix();
    auto ct = c.middleRows(static_cast<Eigen::Index>(t) * batch, batch);
    ct = g.leftCols(hidden).cwiseProduct(g.middleCols(2 * hidden, hidden));
    if (s > 0)
      ct += g.middleCols(hidden, hidden)
                .cwiseProduct(c.middleRows(static_cast<Eigen::Index>(prev) * batch,
                                           batch));
    auto tc = tanh_c.middleRows(static_cast<Eigen::Index>(t) * batch, batch);
    tc = ct.array().tanh().matrix();
    h.middleRows(static_cast<Eigen::Index>(t) * batch, batch) =
        g.rightCols(hidden).cwiseProduct(tc);
  }
  Matrix out = h;
  return MakeResult(
      std::move(out), {x, w_ih, w_hh, bias},
      [=, gates = std::move(gates), c = std::move(c),
       tanh_c = std::move(tanh_c)](Node &n) {
        Node &x = In(n, 0), &wih = In(n, 1), &whh = In(n, 2), &b = In(n, 3);
        const Matrix &hs = n.value;
        Matrix dgates(hs.rows(), h4);
        Matrix dh_next = Matrix::Zero(batch, hidden);
        Matrix dc_next = Matrix::Zero(batch, hidden);
        Matrix dwhh = Matrix::Zero(hidden, h4);
        for (int s = steps - 1; s >= 0; --s) {
          const int t = reverse ? steps - 1 - s : s;
          const int prev = reverse ? t + 1 : t - 1;
          const Eigen::Index r0 = static_cast<Eigen::Index>(t) * batch;
          auto g = gates.middleRows(r0, batch);
          auto ig = g.leftCols(hidden).array();
          auto fg = g.middleCols(hidden, hidden).array();
          auto gg = g.middleCols(2 * hidden, hidden).array();
          auto og = g.rightCols(hidden).array();
          auto tc = tanh_c.middleRows(r0, batch).array();
          Eigen::ArrayXXf dh = (n.grad.middleRows(r0, batch) + dh_next).array();
          Eigen::ArrayXXf dc = dh * og * (1.0f - tc.square()) + dc_next.array();
          auto dg = dgates.middleRows(r0, batch);
          dg.leftCols(hidden) = (dc * gg * ig * (1.0f - ig)).matrix();
          if (s > 0)
            dg.middleCols(hidden, hidden) =
                (dc * c.middleRows(static_cast<Eigen::Index>(prev) * batch, batch)
                          .array() *
                 fg * (1.0f - fg))
                    .matrix();
          else
            dg.middleCols(hidden, hidden).setZero();
          dg.middleCols(2 * hidden, hidden) = (dc * ig * (1.0f - gg.square())).matrix();
          dg.rightCols(hidden) = (dh * tc * og * (1.0f - og)).matrix();
          dc_next = (dc * fg).matrix();
          if (s > 0) {
            const Eigen::Index p0 = static_cast<Eigen::Index>(prev) * batch;
            dwhh.noalias() += hs.middleRows(p0, batch).transpose() * dg;
            dh_next.noalias() = dg * whh.value.transpose();
          }
        }
        if (whh.requires_grad) whh.GradBuffer() += dwhh;
        if (wih.requires_grad) wih.GradBuffer().noalias() += x.value.transpose() * dgates;
        if (b.requires_grad) b.GradBuffer() += dgates.colwise().sum();
        if (x.requires_grad) x.GradBuffer().noalias() += dgates * wih.value.transpose();
      });
}

Tensor NegSiSdr(const Tensor &estimate, std::span<const double> reference) {
  GTSE_REQUIRE(estimate.rows() == 1 &&
                   estimate.cols() == static_cast<Eigen::Index>(reference.size()),
               "SI-SDR loss needs a 1 x L estimate matching the reference");
  std::vector<double> est = ToVector(estimate);
  LossAndGrad lg = NegSiSdrLossGrad(est, reference);
  Matrix out(1, 1);
  out(0, 0) = static_cast<float>(lg.loss);
  Matrix grad(1, static_cast<Eigen::Index>(lg.grad.size()));
  for (size_t i = 0; i < lg.grad.size(); ++i) grad(0, i) = static_cast<float>(lg.grad[i]);
  return MakeResult(std::move(out), {estimate}, [grad = std::move(grad)](Node &n) {
    In(n, 0).GradBuffer() += grad * n.grad(0, 0);
  });
}

Tensor Bce(const Tensor &probability, int y) {
  GTSE_REQUIRE(probability.rows() == 1 && probability.cols() == 1,
               "BCE needs a scalar probability");
  const PairLabel label{y, probability.item()};
  Matrix out(1, 1);
  out(0, 0) = static_cast<float>(BceLoss(label));
  const float d = static_cast<float>(BceLossGrad(label));
  return MakeResult(std::move(out), {probability}, [d](Node &n) {
    In(n, 0).GradBuffer()(0, 0) += d * n.grad(0, 0);
  });
}

std::vector<double> ToVector(const Tensor &row) {
  std::vector<double> out(static_cast<size_t>(row.value().size()));
  for (size_t i = 0; i < out.size(); ++i) out[i] = row.value().data()[i];
  return out;
}

}  // namespace gtse::nn
