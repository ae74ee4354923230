// src/objectives.cc

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

#include "gtse/objectives.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtse/error.h"

namespace gtse {

namespace {

constexpr double kDistortionFloor = 1e-8;

struct SiSdrParts {
  std::vector<double> target;      // alpha * s, zero-mean
  std::vector<double> distortion;  // s_hat - target
  double target_energy = 0.0;
  double distortion_energy = 0.0;
  double db = 0.0;
  bool saturated = false;
};

SiSdrParts Decompose(std::span<const double> estimate,
                     std::span<const double> reference) {
  GTSE_REQUIRE(estimate.size() == reference.size(), "SI-SDR length mismatch: ",
               estimate.size(), " vs ", reference.size());
  GTSE_REQUIRE(estimate.size() >= 2, "SI-SDR needs at least two samples");
  const size_t n = estimate.size();
  const double me = std::accumulate(estimate.begin(), estimate.end(), 0.0) / n;
  const double mr = std::accumulate(reference.begin(), reference.end(), 0.0) / n;
  double dot = 0.0, ref_energy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = reference[i] - mr;
    dot += (estimate[i] - me) * r;
    ref_energy += r * r;
  }
  if (!(ref_energy > 0.0))
    Fail(ErrorKind::kDegenerateSignal,
         "SI-SDR reference has zero energy after mean removal");
  const double alpha = dot / ref_energy;
  SiSdrParts p;
  p.target.resize(n);
  p.distortion.resize(n);
  for (size_t i = 0; i < n; ++i) {
    p.target[i] = alpha * (reference[i] - mr);
    p.distortion[i] = (estimate[i] - me) - p.target[i];
    p.target_energy += p.target[i] * p.target[i];
    p.distortion_energy += p.distortion[i] * p.distortion[i];
  }
  const double denom =
      std::max(p.distortion_energy, kDistortionFloor * p.target_energy);
  double db;
  if (p.target_energy <= 0.0)
    db = -kSiSdrCeilingDb;
  else
    db = 10.0 * std::log10(p.target_energy / denom);
  p.saturated = !(db > -kSiSdrCeilingDb && db < kSiSdrCeilingDb) ||
                p.distortion_energy < kDistortionFloor * p.target_energy;
  p.db = std::clamp(db, -kSiSdrCeilingDb, kSiSdrCeilingDb);
  return p;
}

}  // namespace

double SiSdr(std::span<const double> estimate,
             std::span<const double> reference) {
  return Decompose(estimate, reference).db;
}

double SiSdr(const Waveform &estimate, const Waveform &reference) {
  return SiSdr(estimate.samples(), reference.samples());
}

LossAndGrad NegSiSdrLossGrad(std::span<const double> estimate,
                             std::span<const double> reference) {
  SiSdrParts p = Decompose(estimate, reference);
  LossAndGrad out;
  out.loss = -p.db;
  out.grad.assign(estimate.size(), 0.0);
  if (p.saturated) return out;
  // d/ds_hat of -10 log10(|t|^2 / |e|^2) = -(20 / ln 10) (t/|t|^2 - e/|e|^2)
  const double k = -20.0 / std::log(10.0);
  for (size_t i = 0; i < out.grad.size(); ++i)
    out.grad[i] = k * (p.target[i] / p.target_energy -
                       p.distortion[i] / p.distortion_energy);
  return out;
}

double NegSiSdrLoss(const Waveform &estimate, const Waveform &reference) {
  return -SiSdr(estimate, reference);
}

PitResult PitLoss(const std::vector<std::vector<double>> &estimates,
                  const std::vector<std::vector<double>> &references) {
  const size_t n = estimates.size();
  GTSE_REQUIRE(n >= 1 && n == references.size(), "PIT needs equal, non-empty ",
               "estimate and reference lists (", n, " vs ", references.size(),
               ")");
  if (n > static_cast<size_t>(kMaxPitSources))
    Fail(ErrorKind::kUnsupportedSize, "exhaustive PIT supports at most ",
         kMaxPitSources, " sources, got ", n);
  for (size_t j = 0; j < n; ++j)
    GTSE_REQUIRE(estimates[j].size() == references[0].size() &&
                     references[j].size() == references[0].size(),
                 "PIT waveforms must share one length");

  // score[j][k] = SI-SDR(estimate j, reference k)
  std::vector<std::vector<double>> score(n, std::vector<double>(n));
  for (size_t j = 0; j < n; ++j)
    for (size_t k = 0; k < n; ++k) score[j][k] = SiSdr(estimates[j], references[k]);

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  PitResult best;
  bool have = false;
  do {
    double sum = 0.0;
    for (size_t j = 0; j < n; ++j) sum += -score[j][perm[j]];
    const double loss = sum / static_cast<double>(n);
    // permutations arrive in lexicographic order, so strict < keeps the
    // smallest one on ties
    if (!have || loss < best.loss) {
      best.loss = loss;
      best.assignment.mapping = perm;
      have = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (size_t j = 0; j < n; ++j)
    best.assignment.per_pair_scores.push_back(score[j][best.assignment.mapping[j]]);
  return best;
}

PitResult PitLoss(const std::vector<Waveform> &estimates,
                  const std::vector<Waveform> &references) {
  std::vector<std::vector<double>> e, r;
  for (const Waveform &w : estimates) e.push_back(w.vec());
  for (const Waveform &w : references) r.push_back(w.vec());
  return PitLoss(e, r);
}

double BceLoss(const PairLabel &label) {
  GTSE_REQUIRE(label.y == 0 || label.y == 1, "pair label must be 0 or 1");
  GTSE_REQUIRE(!std::isnan(label.y_hat), "predicted probability is NaN");
  const double p = std::clamp(label.y_hat, kProbabilityClamp,
                              1.0 - kProbabilityClamp);
  return -label.y * std::log(p) - (1 - label.y) * std::log(1.0 - p);
}

double BceLossGrad(const PairLabel &label) {
  GTSE_REQUIRE(label.y == 0 || label.y == 1, "pair label must be 0 or 1");
  if (label.y_hat < kProbabilityClamp || label.y_hat > 1.0 - kProbabilityClamp)
    return 0.0;
  const double p = label.y_hat;
  return -label.y / p + (1 - label.y) / (1.0 - p);
}

}  // namespace gtse
