// src/gesture.cc

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

#include "gtse/gesture.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gtse/error.h"

namespace gtse {

namespace {

constexpr char kPoseMagic[8] = {'G', 'T', 'S', 'E', 'P', 'O', 'S', 'E'};
constexpr uint32_t kPoseFormatVersion = 1;

void CheckStats(const JointStats &stddev) {
  for (int i = 0; i < kPoseDims; ++i)
    GTSE_REQUIRE(stddev[i] > 0.0 && std::isfinite(stddev[i]),
                 "pose std must be positive, entry ", i, " is ", stddev[i]);
}

}  // namespace

const std::array<std::string_view, kNumJoints> &JointNames() {
  static const std::array<std::string_view, kNumJoints> names = {
      "head",       "neck",       "nose",       "spine",    "l_shoulder",
      "r_shoulder", "l_elbow",    "r_elbow",    "l_wrist",  "r_wrist"};
  return names;
}

uint32_t JointOrderHash() {
  uint32_t h = 2166136261u;
  bool first = true;
  for (std::string_view name : JointNames()) {
    if (!first) h = (h ^ uint32_t(',')) * 16777619u;
    first = false;
    for (char c : name) h = (h ^ uint32_t(static_cast<unsigned char>(c))) * 16777619u;
  }
  return h;
}

PoseSequence::PoseSequence(std::vector<double> joints, double frame_rate)
    : joints_(std::move(joints)), frame_rate_(frame_rate) {
  GTSE_REQUIRE(!joints_.empty() && joints_.size() % kPoseDims == 0,
               "pose data size ", joints_.size(),
               " is not a positive multiple of ", kPoseDims);
  GTSE_REQUIRE(frame_rate_ > 0.0, "pose frame rate must be positive");
  for (size_t i = 0; i < joints_.size(); ++i)
    GTSE_REQUIRE(std::isfinite(joints_[i]), "non-finite pose coordinate at ",
                 i / kPoseDims, "/", (i % kPoseDims) / 3);
}

PoseSequence PoseSequence::Prefix(int frames) const {
  GTSE_REQUIRE(frames >= 1 && frames <= num_frames(), "pose prefix ", frames,
               " out of range [1, ", num_frames(), "]");
  return PoseSequence(std::vector<double>(joints_.begin(),
                                          joints_.begin() + frames * kPoseDims),
                      frame_rate_);
}

PoseSequence SpineCenter(const PoseSequence &pose) {
  std::vector<double> out(pose.data());
  for (int t = 0; t < pose.num_frames(); ++t) {
    double *frame = out.data() + static_cast<size_t>(t) * kPoseDims;
    const double sx = frame[kSpine * 3], sy = frame[kSpine * 3 + 1],
                 sz = frame[kSpine * 3 + 2];
    for (int j = 0; j < kNumJoints; ++j) {
      frame[j * 3] -= sx;
      frame[j * 3 + 1] -= sy;
      frame[j * 3 + 2] -= sz;
    }
  }
  return PoseSequence(std::move(out), pose.frame_rate());
}

double MaxSpineOffset(const PoseSequence &pose) {
  double m = 0.0;
  for (int t = 0; t < pose.num_frames(); ++t)
    for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(pose.at(t, kSpine, a)));
  return m;
}

std::vector<int> UpsampleIndexMap(int in_len, int out_len) {
  GTSE_REQUIRE(in_len >= 1, "cannot up-sample an empty sequence");
  GTSE_REQUIRE(out_len >= in_len, "up-sampling target ", out_len,
               " is shorter than the input (", in_len, " frames)");
  std::vector<int> idx(out_len);
  for (int j = 0; j < out_len; ++j)
    idx[j] = static_cast<int>((static_cast<int64_t>(j) * in_len) / out_len);
  return idx;
}

GestureEmbedding UpsampleTo(const GestureEmbedding &frames, int target_len) {
  GTSE_REQUIRE(frames.num_frames >= 1 &&
                   frames.values.size() ==
                       static_cast<size_t>(frames.num_frames) * frames.channels,
               "malformed gesture embedding");
  const std::vector<int> idx = UpsampleIndexMap(frames.num_frames, target_len);
  GestureEmbedding out;
  out.num_frames = target_len;
  out.channels = frames.channels;
  out.frame_rate = frames.frame_rate * target_len / frames.num_frames;
  out.values.resize(static_cast<size_t>(target_len) * frames.channels);
  for (int j = 0; j < target_len; ++j)
    std::copy_n(frames.values.begin() +
                    static_cast<size_t>(idx[j]) * frames.channels,
                frames.channels,
                out.values.begin() + static_cast<size_t>(j) * frames.channels);
  return out;
}

PoseSequence PoseStatsNormalize(const PoseSequence &pose, const JointStats &mean,
                                const JointStats &stddev) {
  CheckStats(stddev);
  std::vector<double> out(pose.data());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = (out[i] - mean[i % kPoseDims]) / stddev[i % kPoseDims];
  return PoseSequence(std::move(out), pose.frame_rate());
}

PoseSequence PoseStatsDenormalize(const PoseSequence &pose,
                                  const JointStats &mean,
                                  const JointStats &stddev) {
  CheckStats(stddev);
  std::vector<double> out(pose.data());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = out[i] * stddev[i % kPoseDims] + mean[i % kPoseDims];
  return PoseSequence(std::move(out), pose.frame_rate());
}

PoseStats ComputePoseStats(const std::vector<PoseSequence> &poses) {
  GTSE_REQUIRE(!poses.empty(), "pose statistics need at least one sequence");
  JointStats sum{}, sq{};
  double n = 0.0;
  for (const PoseSequence &p : poses) {
    for (size_t i = 0; i < p.data().size(); ++i) sum[i % kPoseDims] += p.data()[i];
    n += p.num_frames();
  }
  PoseStats stats;
  for (int d = 0; d < kPoseDims; ++d) stats.mean[d] = sum[d] / n;
  for (const PoseSequence &p : poses)
    for (size_t i = 0; i < p.data().size(); ++i) {
      const double c = p.data()[i] - stats.mean[i % kPoseDims];
      sq[i % kPoseDims] += c * c;
    }
  for (int d = 0; d < kPoseDims; ++d) {
    const double s = std::sqrt(sq[d] / n);
    stats.stddev[d] = s > 1e-8 ? s : 1.0;
  }
  return stats;
}

int PoseFramesForDuration(double seconds, double frame_rate) {
  return static_cast<int>(std::floor(seconds * frame_rate + 1e-9));
}

PoseSequence AlignPoseToAudio(const PoseSequence &pose, double audio_seconds) {
  const int want = std::max(1, PoseFramesForDuration(audio_seconds,
                                                     pose.frame_rate()));
  if (pose.num_frames() >= want) return pose.Prefix(want);
  if (want - pose.num_frames() > 1)
    Fail(ErrorKind::kDataIntegrity, "pose track has ", pose.num_frames(),
         " frames but audio needs ", want, " (more than one frame short)");
  return pose;
}

void WritePoseFile(const std::string &path, const PoseSequence &pose) {
  std::ofstream os(path, std::ios::binary);
  if (!os) Fail(ErrorKind::kIo, "cannot write pose file ", path);
  const uint32_t version = kPoseFormatVersion, hash = JointOrderHash(),
                 frames = static_cast<uint32_t>(pose.num_frames());
  const double rate = pose.frame_rate();
  os.write(kPoseMagic, sizeof(kPoseMagic));
  os.write(reinterpret_cast<const char *>(&version), 4);
  os.write(reinterpret_cast<const char *>(&rate), 8);
  os.write(reinterpret_cast<const char *>(&hash), 4);
  os.write(reinterpret_cast<const char *>(&frames), 4);
  os.write(reinterpret_cast<const char *>(pose.data().data()),
           static_cast<std::streamsize>(pose.data().size() * sizeof(double)));
  if (!os) Fail(ErrorKind::kIo, "short write to ", path);
}

PoseSequence ReadPoseFile(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open pose file ", path);
  char magic[8];
  uint32_t version = 0, hash = 0, frames = 0;
  double rate = 0.0;
  is.read(magic, 8);
  is.read(reinterpret_cast<char *>(&version), 4);
  is.read(reinterpret_cast<char *>(&rate), 8);
  is.read(reinterpret_cast<char *>(&hash), 4);
  is.read(reinterpret_cast<char *>(&frames), 4);
  if (!is || std::memcmp(magic, kPoseMagic, 8) != 0)
    Fail(ErrorKind::kIo, "not a pose file: ", path);
  if (version != kPoseFormatVersion)
    Fail(ErrorKind::kDataIntegrity, "unsupported pose file version ", version,
         " in ", path);
  if (hash != JointOrderHash())
    Fail(ErrorKind::kDataIntegrity, "joint order mismatch in ", path);
  if (frames == 0)
    Fail(ErrorKind::kDataIntegrity, "pose file has no frames: ", path);
  std::vector<double> data(static_cast<size_t>(frames) * kPoseDims);
  is.read(reinterpret_cast<char *>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!is) Fail(ErrorKind::kDataIntegrity, "truncated pose file ", path);
  try {
    return PoseSequence(std::move(data), rate);
  } catch (const Error &e) {
    Fail(ErrorKind::kDataIntegrity, path, ": ", e.what());
  }
}

}  // namespace gtse
