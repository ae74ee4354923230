// gtse/corpus.h

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

#ifndef GTSE_CORPUS_H_
#define GTSE_CORPUS_H_

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gtse/gesture.h"
#include "gtse/signal.h"

namespace gtse {

enum class Split { kTrain, kValidation, kTest };
const char *SplitName(Split split);
Split ParseSplit(const std::string &name);

/// One ingested (audio, pose) utterance.
struct UtteranceRecord {
  std::string id;
  std::string audio_path;
  std::string pose_path;
  std::string speaker_id;
  double duration_s = 0.0;

  friend bool operator==(const UtteranceRecord &, const UtteranceRecord &) = default;
};

struct MixtureManifestEntry {
  std::string mixture_id;
  Split split = Split::kTrain;
  UtteranceRecord target;
  std::vector<UtteranceRecord> interferers;
  std::vector<double> snrs_db;
  int64_t seed = 0;

  friend bool operator==(const MixtureManifestEntry &,
                         const MixtureManifestEntry &) = default;
};

inline constexpr int kManifestVersion = 1;
inline constexpr double kMaxAbsSnrDb = 10.0;

struct Manifest {
  int version = kManifestVersion;
  uint64_t generator_seed = 0;
  int num_interferers = 1;
  /// Target sampling weight, recorded so readers know the bias applied.
  std::string duration_weighting = "inverse-duration";
  std::vector<MixtureManifestEntry> entries;

  friend bool operator==(const Manifest &, const Manifest &) = default;
};

/// Draws n_mixtures entries. Targets are sampled with weight 1/duration,
/// interferers come from distinct other speakers, SNRs are uniform on
/// [-10, 10] dB. Deterministic in seed.
Manifest SimulateManifest(const std::vector<UtteranceRecord> &records,
                          int n_mixtures, int n_interferers, uint64_t seed,
                          Split split);

/// Header line plus one JSON object per entry.
std::string SerializeManifest(const Manifest &manifest);
Manifest ParseManifest(const std::string &text);
void WriteManifest(const std::string &path, const Manifest &manifest);
Manifest ReadManifest(const std::string &path);

/// Utterance lists, one JSON object per line.
std::string SerializeRecords(const std::vector<UtteranceRecord> &records);
std::vector<UtteranceRecord> ParseRecords(const std::string &text);
void WriteRecords(const std::string &path,
                  const std::vector<UtteranceRecord> &records);
std::vector<UtteranceRecord> ReadRecords(const std::string &path);

/// Assigns whole speakers to train / validation / test with the given
/// fractions (validation and test get at least one speaker each when
/// there are three or more).
std::array<std::vector<UtteranceRecord>, 3> SplitBySpeaker(
    const std::vector<UtteranceRecord> &records, double validation_fraction,
    double test_fraction, uint64_t seed);

/// Throws kDataIntegrity if a speaker appears in more than one split or
/// a target shares a speaker with its interferers.
void CheckSpeakerDisjoint(const std::vector<MixtureManifestEntry> &entries);

struct MaterializedMixture {
  MixtureExample example;
  PoseSequence target_pose;  // raw, as stored on disk
};

/// Loads the referenced files, truncates audio to the shortest source and
/// the target pose to floor(seconds * frame_rate) frames, then mixes.
MaterializedMixture Materialize(const MixtureManifestEntry &entry);

// ---------------------------------------------------------------------------
// Synthetic correlated gesture/speech generator.

inline constexpr double kSynthMinSeconds = 1.0;
inline constexpr double kSynthMaxSeconds = 15.0;
inline constexpr double kSynthMaxLagSeconds = 0.2;

struct SynthPair {
  Waveform speech;
  PoseSequence pose;  // world coordinates, not centred
  double lag_s = 0.0;
  double f0_hz = 0.0;
};

/// Harmonic source with a per-seed pitch and vowel colour, gated by a
/// phrase/syllable envelope; the wrists move with a speed that follows the
/// same envelope, delayed by lag_s.
SynthPair SynthesizePair(uint64_t seed, double duration_s);

/// Writes speaker_count x utterances_per_speaker synthetic utterances
/// (WAV + pose file) under dir and returns their records.
std::vector<UtteranceRecord> WriteSyntheticCorpus(const std::string &dir,
                                                  int speaker_count,
                                                  int utterances_per_speaker,
                                                  double min_seconds,
                                                  double max_seconds,
                                                  uint64_t seed);

// ---------------------------------------------------------------------------
// Pairing data for the gesture-speech classifier.

struct PoolItem {
  std::string id;
  Waveform speech;
  PoseSequence pose;
};

struct GsrPair {
  PoseSequence pose;
  Waveform speech;
  int label = 0;  // 1 when pose and speech come from the same utterance
  std::string pose_id, speech_id;
};

/// Truncates speech and pose to their common duration.
GsrPair AlignPair(const PoseSequence &pose, const Waveform &speech, int label,
                  std::string pose_id, std::string speech_id);

/// One positive and one corpus-wide negative per pool item, shuffled.
std::vector<GsrPair> BalancedPairs(const std::vector<PoolItem> &pool,
                                   uint64_t seed);

/// Every positive and every negative (n^2 pairs).
std::vector<GsrPair> ExhaustivePairs(const std::vector<PoolItem> &pool);

/// Negatives drawn from the interferers of the same mixture.
std::vector<GsrPair> WithinMixturePairs(const MaterializedMixture &mixture,
                                        const std::string &mixture_id);

/// Endless balanced stream; positives and negatives alternate.
class GsrPairStream {
 public:
  GsrPairStream(std::vector<PoolItem> pool, uint64_t seed);
  GsrPair Next();

 private:
  std::vector<PoolItem> pool_;
  std::mt19937_64 rng_;
  bool positive_next_ = true;
};

}  // namespace gtse

#endif  // GTSE_CORPUS_H_
