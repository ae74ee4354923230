// src/corpus.cc

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

#include "gtse/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "gtse/error.h"
#include "gtse/wav_io.h"
#include "json.hpp"

namespace gtse {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char *kManifestFormat = "gtse-mixture-manifest";

std::string ReadText(const std::string &path) {
  std::ifstream is(path);
  if (!is) Fail(ErrorKind::kIo, "cannot open ", path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void WriteText(const std::string &path, const std::string &text) {
  std::ofstream os(path);
  if (!os) Fail(ErrorKind::kIo, "cannot write ", path);
  os << text;
  if (!os) Fail(ErrorKind::kIo, "write failed for ", path);
}

Json RecordToJson(const UtteranceRecord &r) {
  return Json{{"id", r.id},
              {"speaker_id", r.speaker_id},
              {"audio_path", r.audio_path},
              {"pose_path", r.pose_path},
              {"duration_s", r.duration_s}};
}

UtteranceRecord RecordFromJson(const Json &j) {
  UtteranceRecord r;
  r.id = j.at("id").get<std::string>();
  r.speaker_id = j.at("speaker_id").get<std::string>();
  r.audio_path = j.at("audio_path").get<std::string>();
  r.pose_path = j.at("pose_path").get<std::string>();
  r.duration_s = j.at("duration_s").get<double>();
  return r;
}

std::vector<std::string> Lines(const std::string &text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  return lines;
}

Json ParseLine(const std::string &line, size_t lineno) {
  try {
    return Json::parse(line);
  } catch (const Json::exception &e) {
    Fail(ErrorKind::kDataIntegrity, "line ", lineno, ": ", e.what());
  }
}

double Uniform(std::mt19937_64 &rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

const char *SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "?";
}

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  Fail(ErrorKind::kInvalidArgument, "unknown split '", name, "'");
}

Manifest SimulateManifest(const std::vector<UtteranceRecord> &records,
                          int n_mixtures, int n_interferers, uint64_t seed,
                          Split split) {
  GTSE_REQUIRE(n_mixtures >= 0, "mixture count must be non-negative");
  GTSE_REQUIRE(n_interferers >= 1, "need at least one interferer");
  std::map<std::string, std::vector<size_t>> by_speaker;
  for (size_t i = 0; i < records.size(); ++i) {
    GTSE_REQUIRE(records[i].duration_s > 0.0, "record ", records[i].id,
                 " has non-positive duration");
    by_speaker[records[i].speaker_id].push_back(i);
  }
  GTSE_REQUIRE(static_cast<int>(by_speaker.size()) >= n_interferers + 1,
               "need ", n_interferers + 1, " distinct speakers, have ",
               by_speaker.size());
  std::vector<std::string> speakers;
  for (const auto &kv : by_speaker) speakers.push_back(kv.first);

  std::vector<double> weights;
  for (const UtteranceRecord &r : records) weights.push_back(1.0 / r.duration_s);
  std::discrete_distribution<size_t> pick_target(weights.begin(), weights.end());
  std::uniform_real_distribution<double> snr(-kMaxAbsSnrDb, kMaxAbsSnrDb);

  Manifest m;
  m.generator_seed = seed;
  m.num_interferers = n_interferers;
  std::mt19937_64 rng(seed);
  for (int n = 0; n < n_mixtures; ++n) {
    MixtureManifestEntry e;
    char id[32];
    std::snprintf(id, sizeof(id), "%06d", n);
    e.mixture_id = std::string(SplitName(split)) + "-" + id;
    e.split = split;
    e.target = records[pick_target(rng)];
    std::vector<std::string> others;
    for (const std::string &s : speakers)
      if (s != e.target.speaker_id) others.push_back(s);
    for (int i = 0; i < n_interferers; ++i) {
      const size_t k = i + rng() % (others.size() - i);
      std::swap(others[i], others[k]);
      const std::vector<size_t> &utts = by_speaker[others[i]];
      e.interferers.push_back(records[utts[rng() % utts.size()]]);
      e.snrs_db.push_back(snr(rng));
    }
    e.seed = static_cast<int64_t>(rng() >> 1);
    m.entries.push_back(std::move(e));
  }
  return m;
}

std::string SerializeManifest(const Manifest &m) {
  std::string out = Json{{"format", kManifestFormat},
                         {"version", m.version},
                         {"generator_seed", m.generator_seed},
                         {"num_interferers", m.num_interferers},
                         {"duration_weighting", m.duration_weighting},
                         {"snr_range_db", {-kMaxAbsSnrDb, kMaxAbsSnrDb}}}
                        .dump();
  out += "\n";
  for (const MixtureManifestEntry &e : m.entries) {
    Json interferers = Json::array();
    for (const UtteranceRecord &r : e.interferers)
      interferers.push_back(RecordToJson(r));
    out += Json{{"mixture_id", e.mixture_id},
                {"split", SplitName(e.split)},
                {"target", RecordToJson(e.target)},
                {"interferers", interferers},
                {"snrs_db", e.snrs_db},
                {"seed", e.seed}}
               .dump();
    out += "\n";
  }
  return out;
}

Manifest ParseManifest(const std::string &text) {
  const std::vector<std::string> lines = Lines(text);
  if (lines.empty()) Fail(ErrorKind::kDataIntegrity, "manifest is empty");
  Manifest m;
  try {
    const Json header = ParseLine(lines[0], 1);
    if (header.value("format", "") != kManifestFormat)
      Fail(ErrorKind::kDataIntegrity, "manifest header has wrong format tag");
    m.version = header.at("version").get<int>();
    if (m.version != kManifestVersion)
      Fail(ErrorKind::kDataIntegrity, "unsupported manifest version ", m.version);
    m.generator_seed = header.at("generator_seed").get<uint64_t>();
    m.num_interferers = header.at("num_interferers").get<int>();
    m.duration_weighting = header.at("duration_weighting").get<std::string>();
    for (size_t i = 1; i < lines.size(); ++i) {
      const Json j = ParseLine(lines[i], i + 1);
      MixtureManifestEntry e;
      e.mixture_id = j.at("mixture_id").get<std::string>();
      e.split = ParseSplit(j.at("split").get<std::string>());
      e.target = RecordFromJson(j.at("target"));
      for (const Json &r : j.at("interferers")) e.interferers.push_back(RecordFromJson(r));
      e.snrs_db = j.at("snrs_db").get<std::vector<double>>();
      e.seed = j.at("seed").get<int64_t>();
      if (e.interferers.empty() || e.interferers.size() != e.snrs_db.size())
        Fail(ErrorKind::kDataIntegrity, "entry ", e.mixture_id,
             " has mismatched interferer and SNR lists");
      m.entries.push_back(std::move(e));
    }
  } catch (const Json::exception &e) {
    Fail(ErrorKind::kDataIntegrity, "malformed manifest: ", e.what());
  }
  return m;
}

void WriteManifest(const std::string &path, const Manifest &manifest) {
  WriteText(path, SerializeManifest(manifest));
}

Manifest ReadManifest(const std::string &path) {
  return ParseManifest(ReadText(path));
}

std::string SerializeRecords(const std::vector<UtteranceRecord> &records) {
  std::string out;
  for (const UtteranceRecord &r : records) out += RecordToJson(r).dump() + "\n";
  return out;
}

std::vector<UtteranceRecord> ParseRecords(const std::string &text) {
  std::vector<UtteranceRecord> records;
  const std::vector<std::string> lines = Lines(text);
  try {
    for (size_t i = 0; i < lines.size(); ++i)
      records.push_back(RecordFromJson(ParseLine(lines[i], i + 1)));
  } catch (const Json::exception &e) {
    Fail(ErrorKind::kDataIntegrity, "malformed utterance list: ", e.what());
  }
  return records;
}

void WriteRecords(const std::string &path,
                  const std::vector<UtteranceRecord> &records) {
  WriteText(path, SerializeRecords(records));
}

std::vector<UtteranceRecord> ReadRecords(const std::string &path) {
  return ParseRecords(ReadText(path));
}

std::array<std::vector<UtteranceRecord>, 3> SplitBySpeaker(
    const std::vector<UtteranceRecord> &records, double validation_fraction,
    double test_fraction, uint64_t seed) {
  GTSE_REQUIRE(validation_fraction >= 0 && test_fraction >= 0 &&
                   validation_fraction + test_fraction < 1.0,
               "split fractions must be non-negative and leave room for train");
  std::vector<std::string> speakers;
  for (const UtteranceRecord &r : records) speakers.push_back(r.speaker_id);
  std::sort(speakers.begin(), speakers.end());
  speakers.erase(std::unique(speakers.begin(), speakers.end()), speakers.end());
  std::mt19937_64 rng(seed);
  std::shuffle(speakers.begin(), speakers.end(), rng);

  const int n = static_cast<int>(speakers.size());
  int n_val = static_cast<int>(std::lround(validation_fraction * n));
  int n_test = static_cast<int>(std::lround(test_fraction * n));
  if (n >= 3) {
    if (validation_fraction > 0) n_val = std::max(n_val, 1);
    if (test_fraction > 0) n_test = std::max(n_test, 1);
  }
  GTSE_REQUIRE(n_val + n_test < n || n == 0, "not enough speakers (", n,
               ") for the requested split");
  std::map<std::string, int> which;
  for (int i = 0; i < n; ++i)
    which[speakers[i]] = i < n_test ? 2 : (i < n_test + n_val ? 1 : 0);
  std::array<std::vector<UtteranceRecord>, 3> out;
  for (const UtteranceRecord &r : records) out[which[r.speaker_id]].push_back(r);
  return out;
}

void CheckSpeakerDisjoint(const std::vector<MixtureManifestEntry> &entries) {
  std::map<std::string, Split> home;
  for (const MixtureManifestEntry &e : entries) {
    for (const UtteranceRecord &r : e.interferers)
      if (r.speaker_id == e.target.speaker_id)
        Fail(ErrorKind::kDataIntegrity, "mixture ", e.mixture_id,
             " reuses target speaker ", r.speaker_id, " as an interferer");
    std::vector<const UtteranceRecord *> all{&e.target};
    for (const UtteranceRecord &r : e.interferers) all.push_back(&r);
    for (const UtteranceRecord *r : all) {
      auto [it, inserted] = home.emplace(r->speaker_id, e.split);
      if (!inserted && it->second != e.split)
        Fail(ErrorKind::kDataIntegrity, "speaker ", r->speaker_id, " appears in ",
             SplitName(it->second), " and ", SplitName(e.split));
    }
  }
}

MaterializedMixture Materialize(const MixtureManifestEntry &entry) {
  GTSE_REQUIRE(!entry.interferers.empty() &&
                   entry.interferers.size() == entry.snrs_db.size(),
               "entry ", entry.mixture_id, " is malformed");
  std::vector<Waveform> audio{ReadWav(entry.target.audio_path)};
  for (const UtteranceRecord &r : entry.interferers)
    audio.push_back(ReadWav(r.audio_path));
  PoseSequence pose = ReadPoseFile(entry.target.pose_path);
  const double frame = 1.0 / pose.frame_rate();
  if (std::abs(pose.seconds() - audio[0].seconds()) > frame + 1e-9)
    Fail(ErrorKind::kDataIntegrity, "utterance ", entry.target.id, ": audio lasts ",
         audio[0].seconds(), " s but pose lasts ", pose.seconds(), " s");

  audio = TruncateToShortest(audio);
  std::vector<Waveform> interferers(audio.begin() + 1, audio.end());
  MaterializedMixture m{
      SimulateMixture(audio[0], interferers, entry.snrs_db, entry.seed),
      AlignPoseToAudio(pose, audio[0].seconds())};
  return m;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Phrases of overlapping raised-cosine syllables separated by pauses.
std::vector<double> SyllableEnvelope(std::mt19937_64 &rng, size_t n, int rate) {
  std::vector<double> env(n, 0.0);
  const double duration = static_cast<double>(n) / rate;
  double pos = Uniform(rng, 0.0, 0.3);
  while (pos < duration) {
    const double end = std::min(pos + Uniform(rng, 0.6, 1.6), duration);
    for (double c = pos + 0.12; c < end; c += Uniform(rng, 0.22, 0.42)) {
      const double width = Uniform(rng, 0.3, 0.45);
      const double amp = Uniform(rng, 0.6, 1.0);
      const long lo = std::max(0L, std::lround((c - width / 2) * rate));
      const long hi = std::min(static_cast<long>(n), std::lround((c + width / 2) * rate));
      for (long i = lo; i < hi; ++i) {
        const double t = static_cast<double>(i) / rate - c;
        env[i] = std::max(env[i], amp * 0.5 * (1.0 + std::cos(kTwoPi * t / width)));
      }
    }
    pos = end + Uniform(rng, 0.2, 0.6);
  }
  return env;
}

/// Rest posture relative to the spine, in metres.
constexpr std::array<double, kPoseDims> kRestPose = {
    0.0,   0.55,  0.0,   // head
    0.0,   0.35,  0.0,   // neck
    0.0,   0.50,  0.10,  // nose
    0.0,   0.0,   0.0,   // spine
    -0.18, 0.33,  0.0,   // left shoulder
    0.18,  0.33,  0.0,   // right shoulder
    -0.25, 0.05,  0.05,  // left elbow
    0.25,  0.05,  0.05,  // right elbow
    -0.20, -0.15, 0.20,  // left wrist
    0.20,  -0.15, 0.20,  // right wrist
};

/// Wrist displacement path whose per-frame speed is exactly speed[k].
std::vector<std::array<double, 3>> TrackSpeed(std::mt19937_64 &rng,
                                              const std::vector<double> &speed,
                                              double frame_rate) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::array<double, 3>> path(speed.size(), {0.0, 0.0, 0.0});
  std::array<double, 3> dir{g(rng), g(rng), g(rng)};
  for (size_t k = 0; k + 1 < speed.size(); ++k) {
    double norm = 0.0;
    for (int a = 0; a < 3; ++a) {
      dir[a] = dir[a] + 0.5 * g(rng) - 2.0 * path[k][a];
      norm += dir[a] * dir[a];
    }
    norm = std::sqrt(norm) + 1e-12;
    for (int a = 0; a < 3; ++a) {
      dir[a] /= norm;
      path[k + 1][a] = path[k][a] + speed[k] * dir[a] / frame_rate;
    }
  }
  return path;
}

}  // namespace

SynthPair SynthesizePair(uint64_t seed, double duration_s) {
  GTSE_REQUIRE(duration_s >= kSynthMinSeconds && duration_s <= kSynthMaxSeconds,
               "synthetic duration must be in [", kSynthMinSeconds, ", ",
               kSynthMaxSeconds, "] s, got ", duration_s);
  constexpr int fs = kDefaultSampleRate;
  constexpr double fps = kDefaultPoseFrameRate;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const size_t n = static_cast<size_t>(std::lround(duration_s * fs));
  const int frames = PoseFramesForDuration(duration_s, fps);

  const std::vector<double> env = SyllableEnvelope(rng, n, fs);

  // Voice: harmonics under two formant bumps, slow pitch drift.
  const double f0 = Uniform(rng, 100.0, 220.0);
  const double drift_rate = Uniform(rng, 0.3, 1.0);
  const double drift_phase = Uniform(rng, 0.0, kTwoPi);
  const double f1 = Uniform(rng, 300.0, 800.0), f2 = Uniform(rng, 900.0, 2200.0);
  const int harmonics = static_cast<int>(4000.0 / f0);
  std::vector<double> amp(harmonics), phase(harmonics);
  for (int k = 1; k <= harmonics; ++k) {
    const double f = k * f0;
    amp[k - 1] = (0.3 + std::exp(-std::pow((f - f1) / 150.0, 2)) +
                  0.7 * std::exp(-std::pow((f - f2) / 250.0, 2))) / k;
    phase[k - 1] = Uniform(rng, 0.0, kTwoPi);
  }
  std::vector<double> speech(n);
  double base_phase = 0.0, power = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    base_phase += kTwoPi * f0 * (1.0 + 0.08 * std::sin(kTwoPi * drift_rate * t + drift_phase)) / fs;
    double v = 0.02 * g(rng);
    for (int k = 0; k < harmonics; ++k) v += amp[k] * std::sin((k + 1) * base_phase + phase[k]);
    speech[i] = env[i] * v;
    power += speech[i] * speech[i];
  }
  const double gain = 0.1 / std::sqrt(power / n + 1e-20);
  for (double &s : speech) s *= gain;

  // Gesture: wrist speed follows the frame-averaged, delayed envelope.
  const double lag = Uniform(rng, 0.0, kSynthMaxLagSeconds);
  std::vector<double> speed(frames);
  for (int k = 0; k < frames; ++k) {
    const double start = k / fps - lag;
    const long lo = std::max(0L, std::lround(start * fs));
    const long hi = std::min(static_cast<long>(n), std::lround((start + 1.0 / fps) * fs));
    double mean = 0.0;
    for (long i = lo; i < hi; ++i) mean += env[i];
    if (hi > lo) mean /= static_cast<double>(hi - lo);
    speed[k] = 0.05 + 0.6 * mean;
  }
  std::vector<double> left_speed(speed);
  for (double &s : left_speed) s *= 0.5;
  const auto right = TrackSpeed(rng, speed, fps);
  const auto left = TrackSpeed(rng, left_speed, fps);

  const double scale = Uniform(rng, 0.9, 1.1);
  std::array<double, 3> body{Uniform(rng, -1.0, 1.0), Uniform(rng, 0.8, 1.2),
                             Uniform(rng, 2.0, 4.0)};
  std::vector<double> joints(static_cast<size_t>(frames) * kPoseDims);
  for (int k = 0; k < frames; ++k) {
    for (int a = 0; a < 3; ++a) body[a] += 0.002 * g(rng);
    for (int j = 0; j < kNumJoints; ++j) {
      for (int a = 0; a < 3; ++a) {
        double v = scale * kRestPose[j * 3 + a];
        switch (j) {
          case kRightWrist: v += right[k][a]; break;
          case kRightElbow: v += 0.5 * right[k][a]; break;
          case kLeftWrist: v += left[k][a]; break;
          case kLeftElbow: v += 0.5 * left[k][a]; break;
          case kHead:
          case kNose: v += 0.1 * right[k][a]; break;
          default: break;
        }
        joints[(static_cast<size_t>(k) * kNumJoints + j) * 3 + a] =
            body[a] + v + 0.002 * g(rng);
      }
    }
  }
  return SynthPair{Waveform(std::move(speech), fs),
                   PoseSequence(std::move(joints), fps), lag, f0};
}

std::vector<UtteranceRecord> WriteSyntheticCorpus(const std::string &dir,
                                                  int speaker_count,
                                                  int utterances_per_speaker,
                                                  double min_seconds,
                                                  double max_seconds,
                                                  uint64_t seed) {
  GTSE_REQUIRE(speaker_count >= 1 && utterances_per_speaker >= 1,
               "corpus needs at least one speaker and utterance");
  GTSE_REQUIRE(min_seconds <= max_seconds, "min duration exceeds max duration");
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(seed);
  std::vector<UtteranceRecord> records;
  for (int s = 0; s < speaker_count; ++s) {
    for (int u = 0; u < utterances_per_speaker; ++u) {
      // Whole seconds of 1/15 s keep audio and pose lengths consistent.
      const double raw = Uniform(rng, min_seconds, max_seconds);
      const double seconds = std::floor(raw * kDefaultPoseFrameRate) / kDefaultPoseFrameRate;
      const uint64_t pair_seed = rng();
      SynthPair pair = SynthesizePair(pair_seed, std::max(seconds, kSynthMinSeconds));
      char name[64];
      std::snprintf(name, sizeof(name), "spk%03d_utt%03d", s, u);
      UtteranceRecord r;
      r.id = name;
      r.speaker_id = "spk" + std::to_string(s);
      r.audio_path = (std::filesystem::path(dir) / (r.id + ".wav")).string();
      r.pose_path = (std::filesystem::path(dir) / (r.id + ".pose")).string();
      r.duration_s = pair.speech.seconds();
      WriteWav(r.audio_path, pair.speech);
      WritePoseFile(r.pose_path, pair.pose);
      records.push_back(std::move(r));
    }
  }
  return records;
}

// ---------------------------------------------------------------------------

GsrPair AlignPair(const PoseSequence &pose, const Waveform &speech, int label,
                  std::string pose_id, std::string speech_id) {
  const double seconds = std::min(pose.seconds(), speech.seconds());
  const size_t samples = std::min(
      speech.size(), static_cast<size_t>(std::lround(seconds * speech.sample_rate())));
  Waveform s = speech.Prefix(samples);
  PoseSequence p = AlignPoseToAudio(pose, s.seconds());
  return GsrPair{std::move(p), std::move(s), label, std::move(pose_id),
                 std::move(speech_id)};
}

std::vector<GsrPair> BalancedPairs(const std::vector<PoolItem> &pool, uint64_t seed) {
  GTSE_REQUIRE(pool.size() >= 2, "pairing needs at least two utterances");
  std::mt19937_64 rng(seed);
  std::vector<GsrPair> pairs;
  for (size_t k = 0; k < pool.size(); ++k) {
    size_t j = rng() % (pool.size() - 1);
    if (j >= k) ++j;
    pairs.push_back(AlignPair(pool[k].pose, pool[k].speech, 1, pool[k].id, pool[k].id));
    pairs.push_back(AlignPair(pool[k].pose, pool[j].speech, 0, pool[k].id, pool[j].id));
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  return pairs;
}

std::vector<GsrPair> ExhaustivePairs(const std::vector<PoolItem> &pool) {
  GTSE_REQUIRE(pool.size() >= 2, "pairing needs at least two utterances");
  std::vector<GsrPair> pairs;
  for (size_t k = 0; k < pool.size(); ++k)
    for (size_t j = 0; j < pool.size(); ++j)
      pairs.push_back(AlignPair(pool[k].pose, pool[j].speech, j == k ? 1 : 0,
                                pool[k].id, pool[j].id));
  return pairs;
}

std::vector<GsrPair> WithinMixturePairs(const MaterializedMixture &mixture,
                                        const std::string &mixture_id) {
  const MixtureExample &ex = mixture.example;
  std::vector<GsrPair> pairs;
  pairs.push_back(AlignPair(mixture.target_pose, ex.target, 1, mixture_id + "/target",
                            mixture_id + "/target"));
  for (int i = 0; i < ex.num_interferers(); ++i)
    pairs.push_back(AlignPair(mixture.target_pose, ex.interferers[i], 0,
                              mixture_id + "/target",
                              mixture_id + "/interferer" + std::to_string(i)));
  return pairs;
}

GsrPairStream::GsrPairStream(std::vector<PoolItem> pool, uint64_t seed)
    : pool_(std::move(pool)), rng_(seed) {
  GTSE_REQUIRE(pool_.size() >= 2, "pairing needs at least two utterances");
}

GsrPair GsrPairStream::Next() {
  const size_t k = rng_() % pool_.size();
  const bool positive = positive_next_;
  positive_next_ = !positive_next_;
  if (positive)
    return AlignPair(pool_[k].pose, pool_[k].speech, 1, pool_[k].id, pool_[k].id);
  size_t j = rng_() % (pool_.size() - 1);
  if (j >= k) ++j;
  return AlignPair(pool_[k].pose, pool_[j].speech, 0, pool_[k].id, pool_[j].id);
}

}  // namespace gtse
