// gtse/training.h

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

#ifndef GTSE_TRAINING_H_
#define GTSE_TRAINING_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gtse/config_file.h"
#include "gtse/corpus.h"
#include "gtse/gesture.h"
#include "gtse/models.h"
#include "gtse/nn/optim.h"

namespace gtse {

// ---------------------------------------------------------------------------
// Learning-rate schedules.

enum class SchedulePolicy {
  kHalveOnPlateau,  // halve after 6 stalled epochs, stop after 10
  kDecayEachEpoch,  // lr *= 0.9 every epoch, stop after 5 stalled epochs
};
enum class ScheduleAction { kContinue, kHalve, kStop };

inline constexpr int kHalvePatience = 6;
inline constexpr int kHalveStopPatience = 10;
inline constexpr double kEpochDecay = 0.9;
inline constexpr int kDecayStopPatience = 5;

inline constexpr double kSegInitialLr = 5e-4;
inline constexpr double kDprnnInitialLr = 1e-3;
inline constexpr double kGsrInitialLr = 1e-4;

const char *PolicyName(SchedulePolicy policy);
SchedulePolicy ParsePolicy(const std::string &name);
const char *ActionName(ScheduleAction action);

struct ScheduleState {
  double lr = 0.0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int epochs_since_improvement = 0;
  int epoch = 0;
  SchedulePolicy policy = SchedulePolicy::kHalveOnPlateau;

  static ScheduleState Initial(SchedulePolicy policy, double lr);
  friend bool operator==(const ScheduleState &, const ScheduleState &) = default;
};

struct ScheduleStep {
  ScheduleState state;
  ScheduleAction action = ScheduleAction::kContinue;
  bool improved = false;
};

/// Folds one validation loss into the schedule. Improvement is strict.
ScheduleStep StepSchedule(const ScheduleState &state, double val_loss);

// ---------------------------------------------------------------------------
// Checkpoints.

inline constexpr int kCheckpointVersion = 1;

struct NamedMatrix {
  std::string name;
  nn::Matrix value;
};

/// Everything needed to rebuild a network and resume its training.
struct Checkpoint {
  std::string kind;  // "seg", "dprnn" or "gsr"
  KeyValues config;
  std::optional<PoseStats> pose_stats;
  ScheduleState schedule;
  long steps = 0;
  uint64_t seed = 0;
  std::vector<NamedMatrix> params;
  long adam_steps = 0;
  std::vector<nn::Matrix> adam_m, adam_v;  // empty when not saved
};

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);
/// Throws kCheckpoint on any structural problem, kIo if unreadable.
Checkpoint LoadCheckpoint(const std::string &path);

/// Snapshot of current parameter values.
std::vector<NamedMatrix> CaptureParameters(const nn::ParameterList &params);
/// Copies values in; names and shapes must match exactly (kCheckpoint).
void RestoreParameters(const std::vector<NamedMatrix> &saved,
                       nn::ParameterList *params);

/// Network plus the preprocessing state saved with it.
template <typename Net>
struct LoadedModel {
  std::unique_ptr<Net> net;
  std::optional<PoseStats> pose_stats;
  Checkpoint checkpoint;
};

/// Loads a checkpoint of the matching kind. When expected is given, the
/// stored configuration must equal it.
LoadedModel<SegNet> LoadSeg(const std::string &path,
                            const std::optional<SegConfig> &expected = {});
LoadedModel<DprnnNet> LoadDprnn(const std::string &path,
                                const std::optional<DprnnConfig> &expected = {});
LoadedModel<GsrNet> LoadGsr(const std::string &path,
                            const std::optional<GsrConfig> &expected = {});

// ---------------------------------------------------------------------------
// Examples.

struct SegExample {
  std::string id;
  Waveform mixture;
  PoseSequence pose;  // raw; centred and normalised by the trainer
  Waveform target;
};

struct DprnnExample {
  std::string id;
  Waveform mixture;
  std::vector<Waveform> sources;
};

SegExample MakeSegExample(const MaterializedMixture &m, const std::string &id);
DprnnExample MakeDprnnExample(const MaterializedMixture &m, const std::string &id);

/// Spine-centres, then z-scores with the given statistics.
PoseSequence PreparePose(const PoseSequence &raw, const PoseStats &stats);
/// Statistics of the spine-centred poses.
PoseStats FitPoseStats(const std::vector<PoseSequence> &raw);

// ---------------------------------------------------------------------------
// Training loops.

struct TrainOptions {
  uint64_t seed = 1;
  int max_epochs = 200;
  long max_steps = 0;  // optimizer updates; 0 means no limit
  int batch_size = 4;
  /// Passes over the training set per scheduled epoch.
  int passes_per_epoch = 1;
  double initial_lr = 0.0;  // <= 0 selects the network's default
  double clip_norm = 5.0;
  std::string out_dir;  // checkpoints and resolved config; empty to skip
  bool verbose = false;

  KeyValues ToKeyValues() const;
  /// Unset keys keep the values in base.
  static TrainOptions FromKeyValues(const KeyValues &kv, TrainOptions base);
};

struct EpochLog {
  int epoch = 0;
  long steps = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
  ScheduleAction action = ScheduleAction::kContinue;
};

struct TrainResult {
  std::vector<EpochLog> epochs;
  std::vector<double> step_losses;  // mean batch loss per update
  /// Per-update PIT mapping of every item in the batch (separator only).
  std::vector<std::vector<std::vector<int>>> assignments;
  ScheduleState schedule;
  long steps = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  Checkpoint best;  // the network is left holding these parameters
  Checkpoint last;
};

/// Trains SEG with the negative SI-SDR objective. Validation loss is the
/// mean negative SI-SDR in eval mode.
TrainResult TrainSeg(SegNet *net, const std::vector<SegExample> &train,
                     const std::vector<SegExample> &validation,
                     const TrainOptions &opts, const Checkpoint *resume = nullptr);

/// Trains the separator with utterance-level PIT.
TrainResult TrainDprnn(DprnnNet *net, const std::vector<DprnnExample> &train,
                       const std::vector<DprnnExample> &validation,
                       const TrainOptions &opts, const Checkpoint *resume = nullptr);

/// Trains the pairing classifier with BCE on clean speech.
TrainResult TrainGsr(GsrNet *net, const std::vector<GsrPair> &train,
                     const std::vector<GsrPair> &validation,
                     const TrainOptions &opts, const Checkpoint *resume = nullptr);

/// As TrainGsr, but every epoch draws a fresh balanced pair set from the
/// pool (one positive and one corpus-wide negative per utterance).
TrainResult TrainGsrFromPool(GsrNet *net, const std::vector<PoolItem> &pool,
                             const std::vector<GsrPair> &validation,
                             const TrainOptions &opts,
                             const Checkpoint *resume = nullptr);

/// Eval-mode losses, matching the trainers' validation numbers.
double SegValidationLoss(const SegNet &net, const PoseStats &stats,
                         const std::vector<SegExample> &examples);
double DprnnValidationLoss(const DprnnNet &net,
                           const std::vector<DprnnExample> &examples);
double GsrValidationLoss(const GsrNet &net, const PoseStats &stats,
                         const std::vector<GsrPair> &pairs);

/// Fraction (percent) of pairs whose thresholded score matches the label.
double GsrAccuracy(const GsrNet &net, const PoseStats &stats,
                   const std::vector<GsrPair> &pairs, double threshold = 0.5);

}  // namespace gtse

#endif  // GTSE_TRAINING_H_
