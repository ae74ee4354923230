// src/pipeline.cc

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

#include "gtse/pipeline.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "gtse/error.h"
#include "gtse/objectives.h"

namespace gtse {

int SelectStream(const std::vector<double> &scores) {
  GTSE_REQUIRE(!scores.empty(), "no streams to select from");
  int best = 0;
  for (size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = static_cast<int>(i);
  return best;
}

StreamScorer GsrScorer(const GsrNet &net, const PoseStats &stats) {
  return [&net, stats](const Waveform &stream, const PoseSequence &raw_pose) {
    return net.Score(stream, PreparePose(raw_pose, stats));
  };
}

Separator DprnnSeparator(const DprnnNet &net) {
  return [&net](const Waveform &mixture, int num_speakers) {
    return net.Separate(mixture, num_speakers);
  };
}

namespace {

CascadeResult SelectFromStreams(std::vector<Waveform> streams,
                                const PoseSequence &raw_pose,
                                const StreamScorer &score) {
  CascadeResult r;
  for (const Waveform &s : streams) {
    // Scoring needs speech and pose of the same duration.
    const GsrPair aligned = AlignPair(raw_pose, s, 0, "", "");
    r.scores.push_back(score(aligned.speech, aligned.pose));
  }
  r.selected_index = SelectStream(r.scores);
  r.extracted = streams[r.selected_index];
  r.separated = std::move(streams);
  return r;
}

}  // namespace

CascadeResult CascadeExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                             const Separator &separate, const StreamScorer &score,
                             int num_speakers) {
  GTSE_REQUIRE(separate && score, "cascade needs a separator and a scorer");
  std::vector<Waveform> streams = separate(mixture, num_speakers);
  GTSE_REQUIRE(static_cast<int>(streams.size()) == num_speakers,
               "separator returned ", streams.size(), " streams, expected ", num_speakers);
  return SelectFromStreams(std::move(streams), raw_pose, score);
}

CascadeResult CascadeExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                             const std::string &dprnn_checkpoint,
                             const std::string &gsr_checkpoint, int num_speakers) {
  const LoadedModel<DprnnNet> dprnn = LoadDprnn(dprnn_checkpoint);
  const LoadedModel<GsrNet> gsr = LoadGsr(gsr_checkpoint);
  GTSE_REQUIRE(dprnn.net->config().num_speakers == num_speakers,
               "separator was trained for ", dprnn.net->config().num_speakers,
               " speakers, not ", num_speakers);
  return CascadeExtract(mixture, raw_pose, DprnnSeparator(*dprnn.net),
                        GsrScorer(*gsr.net, *gsr.pose_stats), num_speakers);
}

Waveform SegExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                    const SegNet &net, const PoseStats &stats) {
  return net.Extract(mixture, PreparePose(raw_pose, stats));
}

Waveform SegExtract(const Waveform &mixture, const PoseSequence &raw_pose,
                    const std::string &seg_checkpoint) {
  const LoadedModel<SegNet> seg = LoadSeg(seg_checkpoint);
  return SegExtract(mixture, raw_pose, *seg.net, *seg.pose_stats);
}

std::vector<GsrPair> SeparatedPairs(const MaterializedMixture &m, const std::string &id,
                                    const Separator &separate) {
  const int n = m.example.num_interferers() + 1;
  const std::vector<Waveform> streams = separate(m.example.mixture, n);
  GTSE_REQUIRE(static_cast<int>(streams.size()) == n, "separator returned ", streams.size(),
               " streams, expected ", n);
  std::vector<double> si;
  for (const Waveform &s : streams) si.push_back(SiSdr(s, m.example.target));
  const int target = SelectStream(si);
  std::vector<GsrPair> pairs;
  for (int k = 0; k < n; ++k)
    pairs.push_back(AlignPair(m.target_pose, streams[k], k == target ? 1 : 0, id,
                              id + "/stream" + std::to_string(k)));
  return pairs;
}

TrainResult FineTuneGsrOnSeparated(GsrNet *net, const Checkpoint &start,
                                   const std::vector<GsrPair> &train,
                                   const std::vector<GsrPair> &validation,
                                   const TrainOptions &opts) {
  if (!start.pose_stats)
    Fail(ErrorKind::kCheckpoint, "starting checkpoint has no pose statistics");
  Checkpoint init = start;
  init.schedule = ScheduleState::Initial(
      SchedulePolicy::kDecayEachEpoch, opts.initial_lr > 0.0 ? opts.initial_lr : kGsrInitialLr);
  init.steps = 0;
  init.adam_steps = 0;
  init.adam_m.clear();
  init.adam_v.clear();
  return TrainGsr(net, train, validation, opts, &init);
}

const char *SystemName(SystemKind kind) {
  switch (kind) {
    case SystemKind::kSeg: return "seg";
    case SystemKind::kCascade: return "cascade";
    case SystemKind::kDprnnRandom: return "dprnn-random";
    case SystemKind::kDprnnPit: return "dprnn-pit";
  }
  return "?";
}

SystemKind ParseSystem(const std::string &name) {
  for (SystemKind k : {SystemKind::kSeg, SystemKind::kCascade, SystemKind::kDprnnRandom,
                       SystemKind::kDprnnPit})
    if (name == SystemName(k)) return k;
  Fail(ErrorKind::kInvalidArgument, "unknown system '", name, "'");
}

UtteranceScore EvaluateMixture(const MaterializedMixture &m, const std::string &id,
                               size_t index, const SystemModels &models,
                               const EvaluationOptions &opts,
                               double *separation_si_sdri) {
  const MixtureExample &ex = m.example;
  const Waveform &mixture = ex.mixture;
  const Waveform &target = ex.target;
  Waveform estimate{std::vector<double>(1, 0.0)};

  if (opts.system == SystemKind::kSeg) {
    GTSE_REQUIRE(models.seg && models.seg_stats, "seg system needs a model and pose stats");
    estimate = SegExtract(mixture, m.target_pose, *models.seg, *models.seg_stats);
  } else {
    GTSE_REQUIRE(static_cast<bool>(models.separate), "separator system needs a separator");
    const int n = ex.num_interferers() + 1;
    GTSE_REQUIRE(n == models.num_speakers, "mixture ", id, " has ", n,
                 " speakers but the separator expects ", models.num_speakers);
    std::vector<Waveform> streams = models.separate(mixture, n);
    GTSE_REQUIRE(static_cast<int>(streams.size()) == n, "separator returned ",
                 streams.size(), " streams, expected ", n);
    if (separation_si_sdri) {
      const std::vector<Waveform> sources = ex.Sources();
      const PitResult pit = PitLoss(streams, sources);
      double base = 0.0;
      for (const Waveform &s : sources) base += SiSdr(mixture, s);
      *separation_si_sdri = -pit.loss - base / static_cast<double>(n);
    }
    int chosen = 0;
    switch (opts.system) {
      case SystemKind::kCascade: {
        GTSE_REQUIRE(static_cast<bool>(models.score), "cascade needs a stream scorer");
        chosen = SelectFromStreams(streams, m.target_pose, models.score).selected_index;
        break;
      }
      case SystemKind::kDprnnRandom: {
        std::seed_seq seq{static_cast<uint32_t>(opts.seed), static_cast<uint32_t>(opts.seed >> 32),
                          static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32)};
        std::mt19937_64 rng(seq);
        chosen = std::uniform_int_distribution<int>(0, n - 1)(rng);
        break;
      }
      case SystemKind::kDprnnPit: {
        std::vector<double> si;
        for (const Waveform &s : streams) si.push_back(SiSdr(s, target));
        chosen = SelectStream(si);
        break;
      }
      case SystemKind::kSeg: break;
    }
    estimate = streams[chosen];
  }

  UtteranceScore score = MakeUtteranceScore(
      id, Improvement(static_cast<double (*)(const Waveform &, const Waveform &)>(SiSdr),
                      estimate, target, mixture),
      Improvement(static_cast<double (*)(const Waveform &, const Waveform &)>(Sdr), estimate,
                  target, mixture),
      mixture.seconds(), ex.TargetInterferenceSnrDb());
  if (opts.pesq) score.pesqi = Improvement(opts.pesq, estimate, target, mixture);
  if (opts.stoi) score.stoii = Improvement(opts.stoi, estimate, target, mixture);
  return score;
}

namespace {

EvaluationReport Finish(const std::vector<UtteranceScore> &scores,
                        const std::vector<double> &separation,
                        const EvaluationOptions &opts) {
  EvaluationReport report = BreakdownReport(scores, opts.length_bins, opts.snr_bins);
  report.system = SystemName(opts.system);
  if (!separation.empty())
    report.extras.emplace_back(
        "separation_si_sdri",
        std::accumulate(separation.begin(), separation.end(), 0.0) /
            static_cast<double>(separation.size()));
  return report;
}

}  // namespace

EvaluationReport EvaluateSystem(const Manifest &manifest, const SystemModels &models,
                                const EvaluationOptions &opts) {
  GTSE_REQUIRE(!manifest.entries.empty(), "manifest has no entries");
  if (!opts.allow_non_test) {
    for (const MixtureManifestEntry &e : manifest.entries)
      GTSE_REQUIRE(e.split == Split::kTest, "mixture ", e.mixture_id, " belongs to the ",
                   SplitName(e.split), " split; evaluation is restricted to test data");
  }
  std::vector<const MixtureManifestEntry *> order;
  for (const MixtureManifestEntry &e : manifest.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const auto *a, const auto *b) {
    return a->mixture_id < b->mixture_id;
  });
  const bool separator = opts.system != SystemKind::kSeg;
  std::vector<UtteranceScore> scores;
  std::vector<double> separation;
  for (size_t i = 0; i < order.size(); ++i) {
    double sep = 0.0;
    scores.push_back(EvaluateMixture(Materialize(*order[i]), order[i]->mixture_id, i,
                                     models, opts, separator ? &sep : nullptr));
    if (separator) separation.push_back(sep);
  }
  return Finish(scores, separation, opts);
}

EvaluationReport EvaluateMixtures(const std::vector<MaterializedMixture> &mixtures,
                                  const std::vector<std::string> &ids,
                                  const SystemModels &models,
                                  const EvaluationOptions &opts) {
  GTSE_REQUIRE(!mixtures.empty() && mixtures.size() == ids.size(),
               "need one id per mixture and at least one mixture");
  std::vector<size_t> order(mixtures.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return ids[a] < ids[b]; });
  const bool separator = opts.system != SystemKind::kSeg;
  std::vector<UtteranceScore> scores;
  std::vector<double> separation;
  for (size_t i = 0; i < order.size(); ++i) {
    double sep = 0.0;
    scores.push_back(EvaluateMixture(mixtures[order[i]], ids[order[i]], i, models, opts,
                                     separator ? &sep : nullptr));
    if (separator) separation.push_back(sep);
  }
  return Finish(scores, separation, opts);
}

}  // namespace gtse
