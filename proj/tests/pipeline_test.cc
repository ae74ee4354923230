// tests/pipeline_test.cc

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

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gtse/error.h"
#include "gtse/objectives.h"
#include "gtse/pipeline.h"
#include "test_util.h"

namespace gtse {
namespace {

using testing::ScratchDir;

template <typename Fn>
ErrorKind KindOf(Fn fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kIo;
}

MaterializedMixture Mix(uint64_t seed, int interferers, double snr_db = 0.0) {
  const SynthPair target = SynthesizePair(seed, 1.0);
  std::vector<Waveform> others;
  std::vector<double> snrs;
  for (int i = 0; i < interferers; ++i) {
    others.push_back(SynthesizePair(seed * 97 + 13 + i, 1.0).speech);
    snrs.push_back(snr_db);
  }
  return {SimulateMixture(target.speech, others, snrs, static_cast<int64_t>(seed)),
          target.pose};
}

// Returns the true sources in a seed-dependent order: a perfect separator
// with an arbitrary output permutation.
Separator OracleSeparator(const MaterializedMixture &m, uint64_t seed) {
  std::vector<Waveform> sources = m.example.Sources();
  std::mt19937_64 rng(seed);
  std::shuffle(sources.begin(), sources.end(), rng);
  return [sources](const Waveform &, int) { return sources; };
}

// Scorer that compares each stream with the known target.
StreamScorer OracleScorer(const Waveform &target) {
  return [target](const Waveform &stream, const PoseSequence &) {
    const size_t n = std::min(stream.size(), target.size());
    return SiSdr(stream.Prefix(n), target.Prefix(n));
  };
}

DprnnConfig TinyDprnn(int speakers) {
  DprnnConfig c;
  c.encoder.channels = 8;
  c.separator = {8, 8, 1, 20};
  c.num_speakers = speakers;
  return c;
}

SegConfig TinySeg() {
  SegConfig c;
  c.encoder.channels = 8;
  c.separator = {8, 8, 1, 20};
  c.gesture = {1, 4, 0.3};
  return c;
}

TEST_CASE("stream selection is argmax with lowest-index ties") {
  CHECK(SelectStream({0.8, 0.3}) == 0);
  CHECK(SelectStream({0.5, 0.5}) == 0);
  CHECK(SelectStream({0.1, 0.9, 0.9}) == 1);
  CHECK(SelectStream({0.2, 0.1, 0.7}) == 2);
  CHECK(KindOf([] { SelectStream({}); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("oracle scorer always picks the target on perfect separation") {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    const int interferers = 1 + static_cast<int>(seed % 2);
    const MaterializedMixture m = Mix(seed, interferers, seed % 3 == 0 ? -8.0 : 6.0);
    const CascadeResult r =
        CascadeExtract(m.example.mixture, m.target_pose, OracleSeparator(m, seed),
                       OracleScorer(m.example.target), interferers + 1);
    CHECK(r.scores.size() == static_cast<size_t>(interferers + 1));
    CHECK(r.extracted == r.separated[r.selected_index]);
    CHECK(r.extracted == m.example.target);
    CHECK(r.selected_index == SelectStream(r.scores));
  }
}

TEST_CASE("cascade evaluation with oracle parts is fully accurate") {
  std::vector<UtteranceScore> scores;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const MaterializedMixture m = Mix(seed, 1, -5.0 + seed % 10);
    SystemModels models;
    models.separate = OracleSeparator(m, seed);
    models.score = OracleScorer(m.example.target);
    EvaluationOptions opts;
    opts.system = SystemKind::kCascade;
    scores.push_back(EvaluateMixture(m, "m" + std::to_string(seed), seed, models, opts));
  }
  CHECK(ExtractionAccuracy(scores) == 100.0);
}

TEST_CASE("random selection hits the target about half the time") {
  const int n = 400;
  int correct = 0;
  for (int i = 0; i < n; ++i) {
    const MaterializedMixture m = Mix(1000 + i, 1, 0.0);
    SystemModels models;
    models.separate = OracleSeparator(m, i);
    EvaluationOptions opts;
    opts.system = SystemKind::kDprnnRandom;
    opts.seed = 77;
    correct += EvaluateMixture(m, "r", i, models, opts).correct;
  }
  // Binomial, p = 1/2: three standard deviations.
  const double sigma = std::sqrt(0.25 / n);
  CHECK(std::abs(correct / static_cast<double>(n) - 0.5) <= 3 * sigma);
}

TEST_CASE("oracle association dominates the cascade") {
  DprnnNet net(TinyDprnn(2));
  GsrConfig gc;
  gc.encoder.channels = 8;
  gc.fusion_channels = 4;
  gc.gesture = {1, 4, 0.3, true};
  GsrNet gsr(gc);
  std::vector<MaterializedMixture> mixtures;
  std::vector<std::string> ids;
  std::vector<PoseSequence> raw;
  for (uint64_t s = 1; s <= 8; ++s) {
    mixtures.push_back(Mix(s, 1, -4.0 + s));
    ids.push_back("x" + std::to_string(s));
    raw.push_back(mixtures.back().target_pose);
  }
  SystemModels models;
  models.separate = DprnnSeparator(net);
  models.score = GsrScorer(gsr, FitPoseStats(raw));
  EvaluationOptions opts;
  opts.system = SystemKind::kCascade;
  const EvaluationReport cascade = EvaluateMixtures(mixtures, ids, models, opts);
  opts.system = SystemKind::kDprnnPit;
  const EvaluationReport pit = EvaluateMixtures(mixtures, ids, models, opts);
  opts.system = SystemKind::kDprnnRandom;
  const EvaluationReport random = EvaluateMixtures(mixtures, ids, models, opts);
  CHECK(pit.mean_si_sdri >= cascade.mean_si_sdri);
  CHECK(pit.mean_si_sdri >= random.mean_si_sdri);
  for (size_t i = 0; i < ids.size(); ++i) {
    CHECK(pit.per_utterance[i].id == cascade.per_utterance[i].id);
    CHECK(pit.per_utterance[i].si_sdri >= cascade.per_utterance[i].si_sdri);
  }
  CHECK(cascade.system == "cascade");
  REQUIRE(cascade.extras.size() == 1);
  CHECK(cascade.extras[0].first == "separation_si_sdri");
  CHECK(cascade.extras[0].second == pit.extras[0].second);
}

TEST_CASE("report regenerates exactly from its json form") {
  std::vector<MaterializedMixture> mixtures;
  std::vector<std::string> ids;
  for (uint64_t s = 1; s <= 12; ++s) {
    mixtures.push_back(Mix(s, 1, -9.0 + 1.5 * s));
    ids.push_back("id" + std::to_string(100 - s));
  }
  DprnnNet net(TinyDprnn(2));
  SystemModels models;
  models.separate = DprnnSeparator(net);
  EvaluationOptions opts;
  opts.system = SystemKind::kDprnnRandom;
  opts.length_bins = {0.5, 2.0};
  opts.snr_bins = {-5.0, 0.0, 5.0};
  opts.pesq = [](const Waveform &e, const Waveform &r) { return Sdr(e, r) / 10; };
  const EvaluationReport report = EvaluateMixtures(mixtures, ids, models, opts);
  CHECK(std::is_sorted(report.per_utterance.begin(), report.per_utterance.end(),
                       [](const auto &a, const auto &b) { return a.id < b.id; }));
  CHECK(report.mean_pesqi.has_value());
  CHECK_FALSE(report.mean_stoii.has_value());
  CHECK(ReportFromJson(ReportToJson(report)) == report);
}

TEST_CASE("seg extraction preserves length and is repeatable") {
  SegNet net(TinySeg());
  const MaterializedMixture m = Mix(5, 1);
  const PoseStats stats = FitPoseStats({m.target_pose});
  const Waveform a = SegExtract(m.example.mixture, m.target_pose, net, stats);
  const Waveform b = SegExtract(m.example.mixture, m.target_pose, net, stats);
  CHECK(a.size() == m.example.mixture.size());
  CHECK(a == b);

  const auto dir = ScratchDir("pipeline_seg");
  Checkpoint c;
  c.kind = SegNet::kKind;
  c.config = TinySeg().ToKeyValues();
  c.schedule = ScheduleState::Initial(SchedulePolicy::kHalveOnPlateau, kSegInitialLr);
  c.params = CaptureParameters(net.params());
  const std::string no_stats = (dir / "nostats.ckpt").string();
  SaveCheckpoint(no_stats, c);
  CHECK(KindOf([&] { SegExtract(m.example.mixture, m.target_pose, no_stats); }) ==
        ErrorKind::kCheckpoint);
  c.pose_stats = stats;
  const std::string path = (dir / "seg.ckpt").string();
  SaveCheckpoint(path, c);
  CHECK(SegExtract(m.example.mixture, m.target_pose, path) == a);
}

TEST_CASE("checkpoint cascade checks the speaker count") {
  const auto dir = ScratchDir("pipeline_cascade");
  DprnnNet net(TinyDprnn(2));
  Checkpoint d;
  d.kind = DprnnNet::kKind;
  d.config = TinyDprnn(2).ToKeyValues();
  d.schedule = ScheduleState::Initial(SchedulePolicy::kHalveOnPlateau, kDprnnInitialLr);
  d.params = CaptureParameters(net.params());
  SaveCheckpoint((dir / "d.ckpt").string(), d);
  GsrConfig gc;
  gc.encoder.channels = 8;
  gc.fusion_channels = 4;
  gc.gesture = {1, 4, 0.3, true};
  GsrNet gsr(gc);
  const MaterializedMixture m = Mix(3, 1);
  Checkpoint g;
  g.kind = GsrNet::kKind;
  g.config = gc.ToKeyValues();
  g.schedule = ScheduleState::Initial(SchedulePolicy::kDecayEachEpoch, kGsrInitialLr);
  g.params = CaptureParameters(gsr.params());
  g.pose_stats = FitPoseStats({m.target_pose});
  SaveCheckpoint((dir / "g.ckpt").string(), g);

  const CascadeResult r = CascadeExtract(m.example.mixture, m.target_pose,
                                         (dir / "d.ckpt").string(), (dir / "g.ckpt").string(), 2);
  CHECK(r.separated.size() == 2);
  CHECK(r.extracted == r.separated[r.selected_index]);
  for (double p : r.scores) CHECK((p >= 0.0 && p <= 1.0));
  CHECK(KindOf([&] {
          CascadeExtract(m.example.mixture, m.target_pose, (dir / "d.ckpt").string(),
                         (dir / "g.ckpt").string(), 3);
        }) == ErrorKind::kInvalidArgument);
  CHECK(KindOf([&] {
          CascadeExtract(m.example.mixture, m.target_pose, (dir / "g.ckpt").string(),
                         (dir / "d.ckpt").string(), 2);
        }) == ErrorKind::kCheckpoint);
}

TEST_CASE("evaluation refuses non-test entries unless overridden") {
  const auto dir = ScratchDir("pipeline_eval");
  const auto records = WriteSyntheticCorpus(dir.string(), 4, 2, 1.0, 1.5, 9);
  const Manifest train = SimulateManifest(records, 6, 1, 3, Split::kTrain);
  const Manifest test = SimulateManifest(records, 6, 1, 3, Split::kTest);
  DprnnNet net(TinyDprnn(2));
  SystemModels models;
  models.separate = DprnnSeparator(net);
  EvaluationOptions opts;
  opts.system = SystemKind::kDprnnPit;
  CHECK(KindOf([&] { EvaluateSystem(train, models, opts); }) == ErrorKind::kInvalidArgument);
  const EvaluationReport a = EvaluateSystem(test, models, opts);
  CHECK(a.per_utterance.size() == 6);
  opts.allow_non_test = true;
  CHECK(EvaluateSystem(train, models, opts).per_utterance.size() == 6);
  opts.allow_non_test = false;
  CHECK(EvaluateSystem(test, models, opts) == a);

  SystemModels three = models;
  three.num_speakers = 3;
  CHECK(KindOf([&] { EvaluateSystem(test, three, opts); }) == ErrorKind::kInvalidArgument);
  opts.system = SystemKind::kSeg;
  CHECK(KindOf([&] { EvaluateSystem(test, models, opts); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("fine-tuning on separated speech keeps the stored statistics") {
  GsrConfig gc;
  gc.encoder.channels = 8;
  gc.fusion_channels = 4;
  gc.gesture = {1, 4, 0.3, true};
  std::vector<MaterializedMixture> mixtures;
  for (uint64_t s = 1; s <= 4; ++s) mixtures.push_back(Mix(s, 1, 2.0));
  std::vector<GsrPair> train, val;
  for (size_t i = 0; i < mixtures.size(); ++i) {
    auto pairs = SeparatedPairs(mixtures[i], "m" + std::to_string(i),
                                OracleSeparator(mixtures[i], i));
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].label + pairs[1].label == 1);
    for (const GsrPair &p : pairs) {
      // The positive is the true target in the oracle output.
      if (p.label == 1) CHECK(p.speech == mixtures[i].example.target);
      (i < 3 ? train : val).push_back(p);
    }
  }
  GsrNet net(gc);
  Checkpoint start;
  start.kind = GsrNet::kKind;
  start.config = gc.ToKeyValues();
  start.pose_stats = FitPoseStats({SynthesizePair(99, 1.0).pose});
  start.schedule = ScheduleState::Initial(SchedulePolicy::kDecayEachEpoch, 1e-4);
  start.schedule = StepSchedule(start.schedule, 0.5).state;
  start.params = CaptureParameters(net.params());
  TrainOptions opts;
  opts.max_epochs = 2;
  opts.initial_lr = 1e-3;
  const TrainResult r = FineTuneGsrOnSeparated(&net, start, train, val, opts);
  CHECK(r.epochs.size() == 2);
  CHECK(r.epochs[0].epoch == 1);
  CHECK(r.best.pose_stats->mean == start.pose_stats->mean);
  CHECK(r.epochs[0].lr == doctest::Approx(1e-3 * kEpochDecay));
  Checkpoint no_stats = start;
  no_stats.pose_stats.reset();
  CHECK(KindOf([&] { FineTuneGsrOnSeparated(&net, no_stats, train, val, opts); }) ==
        ErrorKind::kCheckpoint);
}

TEST_CASE("system names round-trip") {
  for (SystemKind k : {SystemKind::kSeg, SystemKind::kCascade, SystemKind::kDprnnRandom,
                       SystemKind::kDprnnPit})
    CHECK(ParseSystem(SystemName(k)) == k);
  CHECK(KindOf([] { ParseSystem("oracle"); }) == ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace gtse
