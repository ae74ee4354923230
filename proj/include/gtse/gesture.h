// gtse/gesture.h

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

#ifndef GTSE_GESTURE_H_
#define GTSE_GESTURE_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gtse {

inline constexpr int kNumJoints = 10;
inline constexpr int kPoseDims = kNumJoints * 3;
inline constexpr double kDefaultPoseFrameRate = 15.0;

enum Joint : int {
  kHead = 0,
  kNeck,
  kNose,
  kSpine,
  kLeftShoulder,
  kRightShoulder,
  kLeftElbow,
  kRightElbow,
  kLeftWrist,
  kRightWrist,
};

const std::array<std::string_view, kNumJoints> &JointNames();
/// FNV-1a over the comma-joined joint names; stamped into pose files.
uint32_t JointOrderHash();

/// Per-joint, per-axis statistics (10 x 3, flattened joint-major).
using JointStats = std::array<double, kPoseDims>;

/// Upper-body 3D pose track, T frames x 10 joints x 3 coordinates.
class PoseSequence {
 public:
  explicit PoseSequence(std::vector<double> joints, double frame_rate =
                                               kDefaultPoseFrameRate);

  int num_frames() const { return static_cast<int>(joints_.size() / kPoseDims); }
  double frame_rate() const { return frame_rate_; }
  double seconds() const { return num_frames() / frame_rate_; }
  double at(int frame, int joint, int axis) const {
    return joints_[(static_cast<size_t>(frame) * kNumJoints + joint) * 3 + axis];
  }
  /// Flattened frame-major data: frame t occupies [30 t, 30 t + 30).
  const std::vector<double> &data() const { return joints_; }

  PoseSequence Prefix(int frames) const;

  friend bool operator==(const PoseSequence &, const PoseSequence &) = default;

 private:
  std::vector<double> joints_;
  double frame_rate_;
};

/// Latent gesture frames, row-major T_v x C_v.
struct GestureEmbedding {
  int num_frames = 0;
  int channels = 0;
  std::vector<double> values;
  double frame_rate = 0.0;

  double at(int t, int c) const {
    return values[static_cast<size_t>(t) * channels + c];
  }
};

/// Subtracts the spine joint from every joint, frame by frame.
PoseSequence SpineCenter(const PoseSequence &pose);

/// Largest spine-coordinate magnitude; zero for a centred pose.
double MaxSpineOffset(const PoseSequence &pose);

/// Output frame j takes input frame floor(j * in_len / out_len).
std::vector<int> UpsampleIndexMap(int in_len, int out_len);

GestureEmbedding UpsampleTo(const GestureEmbedding &frames, int target_len);

PoseSequence PoseStatsNormalize(const PoseSequence &pose, const JointStats &mean,
                                const JointStats &stddev);
PoseSequence PoseStatsDenormalize(const PoseSequence &pose,
                                  const JointStats &mean,
                                  const JointStats &stddev);

struct PoseStats {
  JointStats mean{};
  JointStats stddev{};
};

/// Pooled per-coordinate mean and standard deviation over all frames.
/// Coordinates with (near) zero spread get unit deviation.
PoseStats ComputePoseStats(const std::vector<PoseSequence> &poses);

/// Number of pose frames that fit into an audio span, floor(seconds * rate).
int PoseFramesForDuration(double seconds, double frame_rate);

/// Head-aligned truncation of a pose track to cover the given audio span.
/// Fails with a data-integrity error if the track is shorter by more than
/// one frame.
PoseSequence AlignPoseToAudio(const PoseSequence &pose, double audio_seconds);

void WritePoseFile(const std::string &path, const PoseSequence &pose);
PoseSequence ReadPoseFile(const std::string &path);

}  // namespace gtse

#endif  // GTSE_GESTURE_H_
