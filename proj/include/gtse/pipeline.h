// gtse/pipeline.h

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

#ifndef GTSE_PIPELINE_H_
#define GTSE_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gtse/corpus.h"
#include "gtse/metrics.h"
#include "gtse/models.h"
#include "gtse/training.h"

namespace gtse {

/// Index of the largest score; equal scores resolve to the lowest index.
int SelectStream(const std::vector<double> &scores);

/// Probability that a separated stream belongs to the speaker whose pose
/// is given.
using StreamScorer =
    std::function<double(const Waveform &stream, const PoseSequence &raw_pose)>;
/// Splits a mixture into num_speakers streams.
using Separator =
    std::function<std::vector<Waveform>(const Waveform &mixture, int num_speakers)>;

/// Scores with a trained classifier, normalising the raw pose with the
/// statistics stored alongside it.
StreamScorer GsrScorer(const GsrNet &net, const PoseStats &stats);
Separator DprnnSeparator(const DprnnNet &net);

struct CascadeResult {
  int selected_index = 0;
  std::vector<double> scores;
  std::vector<Waveform> separated;
  Waveform extracted{std::vector<double>(1, 0.0)};
};

/// Separates, scores every stream against the pose and keeps the best one.
CascadeResult CascadeExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                             const Separator &separate, const StreamScorer &score,
                             int num_speakers);

/// Loads both checkpoints and runs the cascade. num_speakers must match the
/// separator (invalid-argument otherwise).
CascadeResult CascadeExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                             const std::string &dprnn_checkpoint,
                             const std::string &gsr_checkpoint, int num_speakers);

/// Pose-cued extraction with stored normalisation statistics.
Waveform SegExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                    const SegNet &net, const PoseStats &stats);
Waveform SegExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                    const std::string &seg_checkpoint);

/// Pairing data from separated speech: the stream closest to the target
/// (by SI-SDR) with the target pose is the positive, every other stream a
/// negative.
std::vector<GsrPair> SeparatedPairs(const MaterializedMixture &m, const std::string &id,
                                    const Separator &separate);

/// Continues training a clean-trained classifier on separated speech. The
/// pose statistics of the starting checkpoint are kept; the schedule and
/// optimizer state start afresh.
TrainResult FineTuneGsrOnSeparated(GsrNet *net, const Checkpoint &start,
                                   const std::vector<GsrPair> &train,
                                   const std::vector<GsrPair> &validation,
                                   const TrainOptions &opts);

enum class SystemKind { kSeg, kCascade, kDprnnRandom, kDprnnPit };
const char *SystemName(SystemKind kind);
SystemKind ParseSystem(const std::string &name);

/// The models a system needs; unused members may be left empty.
struct SystemModels {
  const SegNet *seg = nullptr;
  std::optional<PoseStats> seg_stats;
  Separator separate;
  StreamScorer score;
  int num_speakers = 2;
};

struct EvaluationOptions {
  SystemKind system = SystemKind::kSeg;
  uint64_t seed = 1;  // drives the random selector
  std::vector<double> length_bins;
  std::vector<double> snr_bins;
  /// Evaluating train or validation entries is refused unless set.
  bool allow_non_test = false;
  /// Optional perceptual metrics, reported as improvements over the mixture.
  MetricFn pesq, stoi;
};

/// Scores one materialised mixture. The index only feeds the random
/// selector's seed.
UtteranceScore EvaluateMixture(const MaterializedMixture &m, const std::string &id,
                               size_t index, const SystemModels &models,
                               const EvaluationOptions &opts,
                               double *separation_si_sdri = nullptr);

/// Runs a system over every manifest entry, ordered by mixture id. Separator
/// systems also report the mean PIT separation SI-SDRi as an extra.
EvaluationReport EvaluateSystem(const Manifest &manifest, const SystemModels &models,
                                const EvaluationOptions &opts);
/// As above for already materialised mixtures, paired with their ids.
EvaluationReport EvaluateMixtures(const std::vector<MaterializedMixture> &mixtures,
                                  const std::vector<std::string> &ids,
                                  const SystemModels &models,
                                  const EvaluationOptions &opts);

}  // namespace gtse

#endif  // GTSE_PIPELINE_H_
