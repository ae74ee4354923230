// gtse/signal.h

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

#ifndef GTSE_SIGNAL_H_
#define GTSE_SIGNAL_H_

#include <cstdint>
#include <span>
#include <vector>

namespace gtse {

inline constexpr int kDefaultSampleRate = 16000;

/// Mono time-domain signal. Samples are never empty and always finite.
class Waveform {
 public:
  explicit Waveform(std::vector<double> samples,
                    int sample_rate = kDefaultSampleRate);

  std::span<const double> samples() const { return samples_; }
  const std::vector<double> &vec() const { return samples_; }
  int sample_rate() const { return sample_rate_; }
  size_t size() const { return samples_.size(); }
  double seconds() const {
    return static_cast<double>(samples_.size()) / sample_rate_;
  }
  double operator[](size_t i) const { return samples_[i]; }

  Waveform Scaled(double gain) const;
  Waveform Prefix(size_t length) const;

  friend bool operator==(const Waveform &, const Waveform &) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_;
};

/// Mean squared amplitude over the whole signal.
double MeanPower(std::span<const double> x);

/// Keeps the head of every waveform up to the shortest length.
std::vector<Waveform> TruncateToShortest(const std::vector<Waveform> &waveforms);

/// Gain g such that 10 log10(P(reference) / P(g * signal)) == snr_db.
double SnrGain(const Waveform &reference, const Waveform &signal, double snr_db);

/// A simulated mixture. Interferers are stored after scaling, so
/// mixture == target + sum(interferers) with unit coefficients.
struct MixtureExample {
  Waveform target;
  std::vector<Waveform> interferers;
  std::vector<double> snrs_db;
  Waveform mixture;
  int64_t seed = 0;

  int num_interferers() const { return static_cast<int>(interferers.size()); }
  /// Energy contrast of the target against the summed interference.
  double TargetInterferenceSnrDb() const;
  /// All sources, target first.
  std::vector<Waveform> Sources() const;
};

MixtureExample SimulateMixture(const Waveform &target,
                               const std::vector<Waveform> &interferers,
                               const std::vector<double> &snrs_db,
                               int64_t seed);

}  // namespace gtse

#endif  // GTSE_SIGNAL_H_
