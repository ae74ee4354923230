// gtse/metrics.h

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

#ifndef GTSE_METRICS_H_
#define GTSE_METRICS_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gtse/signal.h"

namespace gtse {

/// Fixed-scale SDR: 10 log10(|s|^2 / |s_hat - s|^2), no projection, no
/// distortion filter, clamped to [-80, 80] dB.
double Sdr(std::span<const double> estimate, std::span<const double> reference);
double Sdr(const Waveform &estimate, const Waveform &reference);

using MetricFn = std::function<double(const Waveform &, const Waveform &)>;

/// metric(estimate, reference) - metric(mixture, reference).
double Improvement(const MetricFn &metric, const Waveform &estimate,
                   const Waveform &reference, const Waveform &mixture);

struct UtteranceScore {
  std::string id;
  double si_sdri = 0.0;
  double sdri = 0.0;
  std::optional<double> pesqi;
  std::optional<double> stoii;
  bool correct = false;
  double utterance_len_s = 0.0;
  double target_interference_snr_db = 0.0;

  friend bool operator==(const UtteranceScore &, const UtteranceScore &) = default;
};

/// Builds a score with the accuracy flag derived from si_sdri (> 0 strictly).
UtteranceScore MakeUtteranceScore(std::string id, double si_sdri, double sdri,
                                  double utterance_len_s,
                                  double target_interference_snr_db);

/// Percentage of utterances whose SI-SDRi is strictly positive.
double ExtractionAccuracy(const std::vector<UtteranceScore> &scores);

/// Half-open bin [lo, hi); the outermost bins extend to -inf / +inf.
/// Empty bins carry no mean and no accuracy.
struct BinStat {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  std::optional<double> mean_si_sdri;
  std::optional<double> accuracy_pct;

  friend bool operator==(const BinStat &, const BinStat &) = default;
};

struct EvaluationReport {
  std::string system;
  std::string sdr_variant = "fixed-scale";
  std::vector<UtteranceScore> per_utterance;
  double mean_si_sdri = 0.0;
  double mean_sdri = 0.0;
  std::optional<double> mean_pesqi;
  std::optional<double> mean_stoii;
  double accuracy_pct = 0.0;
  std::vector<double> length_edges;
  std::vector<double> snr_edges;
  std::vector<double> histogram_edges;
  std::vector<BinStat> by_length;
  std::vector<BinStat> by_snr;
  std::vector<int> histogram;  // SI-SDRi counts per histogram bin
  /// Extra system-specific aggregate figures, e.g. separation SI-SDRi.
  std::vector<std::pair<std::string, double>> extras;

  friend bool operator==(const EvaluationReport &, const EvaluationReport &) = default;
};

std::vector<double> DefaultHistogramEdges();

/// Partitions edges e_0 < ... < e_{k-1} into k + 1 bins covering the real
/// line and aggregates SI-SDRi means, accuracies and a histogram.
EvaluationReport BreakdownReport(const std::vector<UtteranceScore> &scores,
                                 const std::vector<double> &length_bins,
                                 const std::vector<double> &snr_bins,
                                 const std::vector<double> &histogram_edges =
                                     DefaultHistogramEdges());

std::string ReportToJson(const EvaluationReport &report);
std::string ReportToText(const EvaluationReport &report);
/// Rebuilds a report from its JSON form by re-running the aggregation
/// over the stored per-utterance scores and bin edges.
EvaluationReport ReportFromJson(const std::string &json);

}  // namespace gtse

#endif  // GTSE_METRICS_H_
