// tests/corpus_test.cc

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

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

#include "doctest.h"
#include "gtse/corpus.h"
#include "gtse/error.h"
#include "gtse/wav_io.h"
#include "oracles.h"
#include "test_util.h"

namespace gtse {
namespace {

using testing::FrameRms;
using testing::JointSpeed;
using testing::MaxLagPearson;
using testing::ScratchDir;

std::vector<UtteranceRecord> FakeRecords(int speakers, int per_speaker) {
  std::vector<UtteranceRecord> out;
  for (int s = 0; s < speakers; ++s)
    for (int u = 0; u < per_speaker; ++u)
      out.push_back({"s" + std::to_string(s) + "u" + std::to_string(u),
                     "/a/" + std::to_string(s) + "_" + std::to_string(u) + ".wav",
                     "/p/" + std::to_string(s) + "_" + std::to_string(u) + ".pose",
                     "spk" + std::to_string(s), 1.0 + 0.1 * u + 1.0 / 3.0});
  return out;
}

template <typename Fn>
Error Caught(Fn fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e;
  }
  FAIL("expected an Error");
  return Error(ErrorKind::kIo, "unreachable");
}

TEST_CASE("three speakers with two interferers use every speaker once") {
  Manifest m = SimulateManifest(FakeRecords(3, 2), 10, 2, 11, Split::kTrain);
  REQUIRE(m.entries.size() == 10u);
  for (const MixtureManifestEntry &e : m.entries) {
    std::set<std::string> spk{e.target.speaker_id};
    for (const UtteranceRecord &r : e.interferers) spk.insert(r.speaker_id);
    CHECK(spk.size() == 3u);
    CHECK(e.snrs_db.size() == 2u);
    CHECK(e.split == Split::kTrain);
  }
  CHECK_NOTHROW(CheckSpeakerDisjoint(m.entries));
}

TEST_CASE("manifest simulation is deterministic") {
  auto recs = FakeRecords(5, 3);
  CHECK(SimulateManifest(recs, 50, 1, 3, Split::kTest) ==
        SimulateManifest(recs, 50, 1, 3, Split::kTest));
  CHECK(SerializeManifest(SimulateManifest(recs, 50, 1, 3, Split::kTest)) ==
        SerializeManifest(SimulateManifest(recs, 50, 1, 3, Split::kTest)));
  CHECK(!(SimulateManifest(recs, 50, 1, 3, Split::kTest) ==
          SimulateManifest(recs, 50, 1, 4, Split::kTest)));
}

TEST_CASE("drawn SNRs are uniform on the allowed range") {
  Manifest m = SimulateManifest(FakeRecords(4, 2), 10000, 1, 5, Split::kTrain);
  double sum = 0.0, lo = 1e9, hi = -1e9;
  for (const auto &e : m.entries) {
    sum += e.snrs_db[0];
    lo = std::min(lo, e.snrs_db[0]);
    hi = std::max(hi, e.snrs_db[0]);
  }
  CHECK(std::abs(sum / 10000) <= 0.3);
  CHECK(lo >= -10.0);
  CHECK(hi <= 10.0);
  CHECK(lo < -9.9);
  CHECK(hi > 9.9);
}

TEST_CASE("shorter targets are drawn more often") {
  std::vector<UtteranceRecord> recs = {{"short", "a", "p", "A", 1.0},
                                       {"long", "b", "q", "B", 4.0},
                                       {"other", "c", "r", "C", 2.0}};
  Manifest m = SimulateManifest(recs, 20000, 1, 9, Split::kTrain);
  std::map<std::string, int> count;
  for (const auto &e : m.entries) ++count[e.target.id];
  // Weights 1 : 1/4 : 1/2.
  CHECK(std::abs(count["short"] / 20000.0 - 4.0 / 7.0) < 0.015);
  CHECK(std::abs(count["long"] / 20000.0 - 1.0 / 7.0) < 0.015);
}

TEST_CASE("manifest simulation rejects too few speakers") {
  CHECK(Caught([] { SimulateManifest(FakeRecords(2, 5), 3, 2, 1, Split::kTrain); })
            .kind() == ErrorKind::kInvalidArgument);
}

TEST_CASE("manifest round trip is bit exact") {
  Manifest m = SimulateManifest(FakeRecords(6, 2), 40, 2, 77, Split::kValidation);
  m.entries[0].snrs_db[0] = 0.1;
  m.entries[1].snrs_db[1] = -1.0 / 3.0;
  m.entries[2].target.id = "quote\"and\\slash";
  const std::string text = SerializeManifest(m);
  Manifest back = ParseManifest(text);
  CHECK(back == m);
  CHECK(SerializeManifest(back) == text);

  auto dir = ScratchDir("manifest_rt");
  WriteManifest((dir / "m.jsonl").string(), m);
  CHECK(ReadManifest((dir / "m.jsonl").string()) == m);

  auto recs = FakeRecords(3, 2);
  CHECK(ParseRecords(SerializeRecords(recs)) == recs);
}

TEST_CASE("malformed manifests are data-integrity errors") {
  CHECK(Caught([] { ParseManifest(""); }).kind() == ErrorKind::kDataIntegrity);
  CHECK(Caught([] { ParseManifest("{\"format\":\"other\"}\n"); }).kind() ==
        ErrorKind::kDataIntegrity);
  Manifest m = SimulateManifest(FakeRecords(3, 1), 2, 1, 1, Split::kTrain);
  std::string text = SerializeManifest(m);
  text += "{not json\n";
  CHECK(Caught([&] { ParseManifest(text); }).kind() == ErrorKind::kDataIntegrity);
  CHECK(Caught([] { ReadManifest("/nonexistent/m.jsonl"); }).kind() == ErrorKind::kIo);
}

TEST_CASE("speaker split is disjoint") {
  auto recs = FakeRecords(20, 3);
  auto parts = SplitBySpeaker(recs, 0.1, 0.1, 4);
  std::map<std::string, int> home;
  size_t total = 0;
  for (int p = 0; p < 3; ++p) {
    CHECK(!parts[p].empty());
    total += parts[p].size();
    for (const auto &r : parts[p]) {
      auto [it, inserted] = home.emplace(r.speaker_id, p);
      CHECK(it->second == p);
    }
  }
  CHECK(total == recs.size());

  std::vector<MixtureManifestEntry> all;
  const Split splits[3] = {Split::kTrain, Split::kValidation, Split::kTest};
  for (int p = 0; p < 3; ++p) {
    int n_spk = static_cast<int>(std::set<std::string>(
        [&] { std::set<std::string> s; for (auto &r : parts[p]) s.insert(r.speaker_id); return s; }())
        .size());
    if (n_spk < 2) continue;
    Manifest m = SimulateManifest(parts[p], 30, 1, p, splits[p]);
    all.insert(all.end(), m.entries.begin(), m.entries.end());
  }
  CHECK_NOTHROW(CheckSpeakerDisjoint(all));

  MixtureManifestEntry leak = all.front();
  leak.split = Split::kTest;
  all.push_back(leak);
  CHECK(Caught([&] { CheckSpeakerDisjoint(all); }).kind() == ErrorKind::kDataIntegrity);
}

UtteranceRecord WriteUtterance(const std::filesystem::path &dir, const std::string &id,
                               const std::string &speaker, uint64_t seed, double seconds) {
  SynthPair p = SynthesizePair(seed, seconds);
  UtteranceRecord r{id, (dir / (id + ".wav")).string(), (dir / (id + ".pose")).string(),
                    speaker, p.speech.seconds()};
  WriteWav(r.audio_path, p.speech);
  WritePoseFile(r.pose_path, p.pose);
  return r;
}

TEST_CASE("materialize truncates to the shorter source") {
  auto dir = ScratchDir("materialize");
  MixtureManifestEntry e;
  e.mixture_id = "m0";
  e.target = WriteUtterance(dir, "t", "A", 1, 3.0);
  e.interferers = {WriteUtterance(dir, "i", "B", 2, 2.0)};
  e.snrs_db = {2.5};
  e.seed = 42;
  MaterializedMixture m = Materialize(e);
  CHECK(m.example.mixture.size() == 32000u);
  CHECK(m.example.target.size() == 32000u);
  CHECK(m.target_pose.num_frames() == 30);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < m.example.mixture.size(); ++i) {
    const double r = m.example.target[i] + m.example.interferers[0][i];
    num += std::pow(m.example.mixture[i] - r, 2);
    den += r * r;
  }
  CHECK(std::sqrt(num / den) <= 1e-6);

  MaterializedMixture again = Materialize(e);
  CHECK(again.example.mixture == m.example.mixture);
  CHECK(again.target_pose == m.target_pose);
  CHECK(again.example.seed == 42);

  MixtureManifestEntry equal = e;
  equal.interferers = {WriteUtterance(dir, "j", "C", 3, 3.0)};
  MaterializedMixture full = Materialize(equal);
  CHECK(full.example.mixture.size() == 48000u);
  CHECK(full.target_pose.num_frames() == 45);
}

TEST_CASE("materialize reports missing and inconsistent files") {
  auto dir = ScratchDir("materialize_bad");
  MixtureManifestEntry e;
  e.mixture_id = "m";
  e.target = WriteUtterance(dir, "t", "A", 1, 2.0);
  e.interferers = {WriteUtterance(dir, "i", "B", 2, 2.0)};
  e.snrs_db = {0.0};

  MixtureManifestEntry missing = e;
  missing.interferers[0].audio_path = (dir / "gone.wav").string();
  Error err = Caught([&] { Materialize(missing); });
  CHECK(err.kind() == ErrorKind::kIo);
  CHECK(std::string(err.what()).find("gone.wav") != std::string::npos);

  MixtureManifestEntry mismatched = e;
  SynthPair longer = SynthesizePair(9, 3.0);
  mismatched.target.pose_path = (dir / "long.pose").string();
  WritePoseFile(mismatched.target.pose_path, longer.pose);
  CHECK(Caught([&] { Materialize(mismatched); }).kind() == ErrorKind::kDataIntegrity);
}

TEST_CASE("synthetic pair shapes and determinism") {
  SynthPair p = SynthesizePair(7, 4.0);
  CHECK(p.speech.size() == 64000u);
  CHECK(p.pose.num_frames() == 60);
  CHECK(p.lag_s >= 0.0);
  CHECK(p.lag_s <= 0.2);
  SynthPair q = SynthesizePair(7, 4.0);
  CHECK(p.speech == q.speech);
  CHECK(p.pose == q.pose);
  CHECK(!(SynthesizePair(8, 4.0).speech == p.speech));
  CHECK(Caught([] { SynthesizePair(1, 0.5); }).kind() == ErrorKind::kInvalidArgument);
  CHECK(Caught([] { SynthesizePair(1, 15.5); }).kind() == ErrorKind::kInvalidArgument);
  CHECK_NOTHROW(SynthesizePair(1, 15.0));
}

// Lags up to 200 ms are three frames at 15 fps.
constexpr int kMaxLagFrames = 3;

double EnvelopeSpeedCorrelation(const Waveform &speech, const PoseSequence &pose) {
  const int frames = pose.num_frames();
  return MaxLagPearson(FrameRms(speech.vec(), speech.sample_rate(), pose.frame_rate(), frames),
                       JointSpeed(pose.data(), frames, kRightWrist, kSpine, pose.frame_rate()),
                       kMaxLagFrames);
}

TEST_CASE("speech envelope and wrist speed are correlated") {
  double worst = 1.0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    SynthPair p = SynthesizePair(seed, 4.0);
    const double r = EnvelopeSpeedCorrelation(p.speech, p.pose);
    worst = std::min(worst, r);
    CHECK(r >= 0.6);
  }
  MESSAGE("lowest correlation over 100 seeds: " << worst);
}

TEST_CASE("a correlation threshold separates paired from unpaired") {
  std::vector<PoolItem> pool;
  for (uint64_t seed = 100; seed < 200; ++seed) {
    SynthPair p = SynthesizePair(seed, 4.0);
    pool.push_back({std::to_string(seed), p.speech, p.pose});
  }
  std::vector<GsrPair> pairs = BalancedPairs(pool, 3);
  int correct = 0;
  for (const GsrPair &pair : pairs) {
    const int guess = EnvelopeSpeedCorrelation(pair.speech, pair.pose) > 0.5 ? 1 : 0;
    correct += guess == pair.label;
  }
  const double acc = 100.0 * correct / pairs.size();
  MESSAGE("threshold oracle accuracy: " << acc << "%");
  CHECK(acc >= 85.0);
}

TEST_CASE("pair construction") {
  SynthPair a = SynthesizePair(1, 2.0), b = SynthesizePair(2, 3.0);
  std::vector<PoolItem> pool{{"1", a.speech, a.pose}, {"2", b.speech, b.pose}};

  std::set<std::tuple<std::string, std::string, int>> got;
  for (const GsrPair &p : BalancedPairs(pool, 5))
    got.insert({p.pose_id, p.speech_id, p.label});
  std::set<std::tuple<std::string, std::string, int>> want{
      {"1", "1", 1}, {"2", "2", 1}, {"1", "2", 0}, {"2", "1", 0}};
  CHECK(got == want);
  CHECK(ExhaustivePairs(pool).size() == 4u);

  for (const GsrPair &p : BalancedPairs(pool, 6)) {
    CHECK(std::abs(p.speech.seconds() - p.pose.seconds()) <= 1.0 / 15.0 + 1e-9);
    if (p.pose_id == "1" || p.speech_id == "1") CHECK(p.speech.seconds() <= 2.0 + 1e-9);
  }

  GsrPairStream stream(pool, 8);
  int positives = 0;
  for (int i = 0; i < 10000; ++i) {
    GsrPair p = stream.Next();
    positives += p.label;
    if (p.label == 0) CHECK(p.pose_id != p.speech_id);
    else CHECK(p.pose_id == p.speech_id);
  }
  CHECK(std::abs(positives / 10000.0 - 0.5) <= 0.01);

  CHECK(Caught([&] { BalancedPairs({pool[0]}, 1); }).kind() == ErrorKind::kInvalidArgument);
  CHECK(Caught([&] { GsrPairStream({pool[0]}, 1); }).kind() == ErrorKind::kInvalidArgument);
}

TEST_CASE("within-mixture negatives use the interferers") {
  SynthPair t = SynthesizePair(1, 2.0), i = SynthesizePair(2, 2.0);
  MaterializedMixture m{SimulateMixture(t.speech, {i.speech}, {0.0}, 1), t.pose};
  std::vector<GsrPair> pairs = WithinMixturePairs(m, "mix");
  REQUIRE(pairs.size() == 2u);
  CHECK(pairs[0].label == 1);
  CHECK(pairs[1].label == 0);
  CHECK(pairs[1].speech == m.example.interferers[0]);
}

TEST_CASE("synthetic corpus on disk") {
  auto dir = ScratchDir("synth_corpus");
  auto recs = WriteSyntheticCorpus(dir.string(), 3, 2, 1.0, 2.0, 5);
  REQUIRE(recs.size() == 6u);
  for (const auto &r : recs) {
    Waveform w = ReadWav(r.audio_path);
    PoseSequence p = ReadPoseFile(r.pose_path);
    CHECK(w.seconds() == doctest::Approx(r.duration_s));
    CHECK(std::abs(w.seconds() - p.seconds()) <= 1.0 / 15.0);
  }
  Manifest m = SimulateManifest(recs, 4, 1, 1, Split::kTrain);
  for (const auto &e : m.entries) CHECK_NOTHROW(Materialize(e));
}

}  // namespace
}  // namespace gtse
