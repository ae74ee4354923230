// src/signal.cc

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

#include "gtse/signal.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gtse/error.h"

namespace gtse {

Waveform::Waveform(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  GTSE_REQUIRE(!samples_.empty(), "waveform must hold at least one sample");
  GTSE_REQUIRE(sample_rate_ > 0, "sample rate must be positive, got ",
               sample_rate_);
  for (size_t i = 0; i < samples_.size(); ++i)
    GTSE_REQUIRE(std::isfinite(samples_[i]), "non-finite sample at index ", i);
}

Waveform Waveform::Scaled(double gain) const {
  std::vector<double> out(samples_);
  for (double &v : out) v *= gain;
  return Waveform(std::move(out), sample_rate_);
}

Waveform Waveform::Prefix(size_t length) const {
  GTSE_REQUIRE(length >= 1 && length <= samples_.size(),
               "prefix length ", length, " out of range");
  if (length == samples_.size()) return *this;
  return Waveform(std::vector<double>(samples_.begin(),
                                      samples_.begin() + length),
                  sample_rate_);
}

double MeanPower(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

std::vector<Waveform> TruncateToShortest(
    const std::vector<Waveform> &waveforms) {
  GTSE_REQUIRE(!waveforms.empty(), "cannot truncate an empty list");
  const int rate = waveforms.front().sample_rate();
  size_t shortest = waveforms.front().size();
  for (const Waveform &w : waveforms) {
    GTSE_REQUIRE(w.sample_rate() == rate, "mismatched sample rates ", rate,
                 " and ", w.sample_rate());
    shortest = std::min(shortest, w.size());
  }
  std::vector<Waveform> out;
  out.reserve(waveforms.size());
  for (const Waveform &w : waveforms) out.push_back(w.Prefix(shortest));
  return out;
}

double SnrGain(const Waveform &reference, const Waveform &signal,
               double snr_db) {
  const double p_ref = MeanPower(reference.samples());
  const double p_sig = MeanPower(signal.samples());
  if (!(p_ref > 0.0) || !(p_sig > 0.0))
    Fail(ErrorKind::kDegenerateSignal, "SNR gain needs non-silent inputs (P_ref=",
         p_ref, ", P_sig=", p_sig, ")");
  GTSE_REQUIRE(std::isfinite(snr_db), "SNR must be finite");
  // P(ref) / (g^2 P(sig)) = 10^(snr/10)
  return std::sqrt(p_ref / (p_sig * std::pow(10.0, snr_db / 10.0)));
}

double MixtureExample::TargetInterferenceSnrDb() const {
  std::vector<double> sum(target.size(), 0.0);
  for (const Waveform &b : interferers)
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += b[i];
  return 10.0 * std::log10(MeanPower(target.samples()) / MeanPower(sum));
}

std::vector<Waveform> MixtureExample::Sources() const {
  std::vector<Waveform> out{target};
  out.insert(out.end(), interferers.begin(), interferers.end());
  return out;
}

MixtureExample SimulateMixture(const Waveform &target,
                               const std::vector<Waveform> &interferers,
                               const std::vector<double> &snrs_db,
                               int64_t seed) {
  GTSE_REQUIRE(!interferers.empty(), "a mixture needs at least one interferer");
  GTSE_REQUIRE(interferers.size() == snrs_db.size(), "got ",
               interferers.size(), " interferers but ", snrs_db.size(),
               " SNR values");
  std::vector<Waveform> all{target};
  all.insert(all.end(), interferers.begin(), interferers.end());
  all = TruncateToShortest(all);

  MixtureExample ex{all[0], {}, snrs_db, all[0], seed};
  std::vector<double> mix(all[0].vec());
  for (size_t i = 0; i < interferers.size(); ++i) {
    const double g = SnrGain(all[0], all[i + 1], snrs_db[i]);
    Waveform scaled = all[i + 1].Scaled(g);
    for (size_t n = 0; n < mix.size(); ++n) mix[n] += scaled[n];
    ex.interferers.push_back(std::move(scaled));
  }
  ex.mixture = Waveform(std::move(mix), target.sample_rate());
  return ex;
}

}  // namespace gtse
