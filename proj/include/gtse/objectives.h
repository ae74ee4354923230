// gtse/objectives.h

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

#ifndef GTSE_OBJECTIVES_H_
#define GTSE_OBJECTIVES_H_

#include <span>
#include <vector>

#include "gtse/signal.h"

namespace gtse {

inline constexpr double kSiSdrCeilingDb = 80.0;
inline constexpr double kProbabilityClamp = 1e-7;

/// Scale-invariant SDR in dB. Both signals are mean-removed first; the
/// distortion energy is floored at 1e-8 of the projected target energy, and
/// the result is clamped to [-80, 80] dB.
double SiSdr(std::span<const double> estimate, std::span<const double> reference);
double SiSdr(const Waveform &estimate, const Waveform &reference);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d estimate
};

/// Negative SI-SDR and its gradient with respect to the estimate samples.
/// The gradient is zero where the clamp or the floor is active.
LossAndGrad NegSiSdrLossGrad(std::span<const double> estimate,
                             std::span<const double> reference);
double NegSiSdrLoss(const Waveform &estimate, const Waveform &reference);

/// mapping[j] is the reference index assigned to estimate j.
struct PermutationAssignment {
  std::vector<int> mapping;
  std::vector<double> per_pair_scores;  // SI-SDR (dB) of each estimate
};

struct PitResult {
  double loss = 0.0;
  PermutationAssignment assignment;
};

inline constexpr int kMaxPitSources = 4;

/// Utterance-level PIT: the mean negative SI-SDR minimised over every
/// estimate-to-reference permutation, searched exhaustively. Ties go to the
/// lexicographically smallest permutation.
PitResult PitLoss(const std::vector<Waveform> &estimates,
                  const std::vector<Waveform> &references);
PitResult PitLoss(const std::vector<std::vector<double>> &estimates,
                  const std::vector<std::vector<double>> &references);

/// Pairing label and predicted probability for the gesture-speech
/// classifier.
struct PairLabel {
  int y = 0;
  double y_hat = 0.5;
};

/// Binary cross-entropy with y_hat clamped into [1e-7, 1 - 1e-7].
double BceLoss(const PairLabel &label);
/// d BceLoss / d y_hat (zero when the clamp is active).
double BceLossGrad(const PairLabel &label);

}  // namespace gtse

#endif  // GTSE_OBJECTIVES_H_
