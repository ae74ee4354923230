// gtse/models.h

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

#ifndef GTSE_MODELS_H_
#define GTSE_MODELS_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gtse/config_file.h"
#include "gtse/gesture.h"
#include "gtse/nn/layers.h"
#include "gtse/signal.h"

namespace gtse {

/// Time-domain front end shared by all three networks.
struct EncoderConfig {
  int kernel = 40;
  int stride = 20;
  int channels = 64;

  void Validate() const;
  /// ceil((len - kernel) / stride) + 1; the input is zero-padded at the tail
  /// so every sample falls in a frame.
  int NumFrames(size_t len) const;
  friend bool operator==(const EncoderConfig &, const EncoderConfig &) = default;
};

/// Dual-path recurrent mask estimator.
struct DualPathConfig {
  int bottleneck = 64;
  int hidden = 32;  // per direction
  int blocks = 2;
  int chunk = 50;

  void Validate() const;
  friend bool operator==(const DualPathConfig &, const DualPathConfig &) = default;
};

/// Gesture encoder: a stack of bidirectional LSTMs over 30-dim pose frames.
struct GestureEncoderConfig {
  int layers = 5;
  int hidden = 128;
  double dropout = 0.3;
  /// Appends the per-joint displacement magnitude since the previous frame
  /// (10 features) to the 30 coordinates.
  bool speed_features = false;

  void Validate() const;
  friend bool operator==(const GestureEncoderConfig &,
                         const GestureEncoderConfig &) = default;
};

struct SegConfig {
  EncoderConfig encoder;
  DualPathConfig separator;
  GestureEncoderConfig gesture;
  uint64_t init_seed = 1;

  void Validate() const;
  KeyValues ToKeyValues() const;
  static SegConfig FromKeyValues(const KeyValues &kv);
  friend bool operator==(const SegConfig &, const SegConfig &) = default;
};

struct DprnnConfig {
  EncoderConfig encoder;
  DualPathConfig separator;
  int num_speakers = 2;
  uint64_t init_seed = 1;

  void Validate() const;
  KeyValues ToKeyValues() const;
  static DprnnConfig FromKeyValues(const KeyValues &kv);
  friend bool operator==(const DprnnConfig &, const DprnnConfig &) = default;
};

struct GsrConfig {
  EncoderConfig encoder{40, 20, 32};
  int conv_layers = 2;
  int conv_kernel = 3;
  int fusion_channels = 8;
  GestureEncoderConfig gesture{2, 16, 0.3, true};
  uint64_t init_seed = 1;

  void Validate() const;
  KeyValues ToKeyValues() const;
  static GsrConfig FromKeyValues(const KeyValues &kv);
  friend bool operator==(const GsrConfig &, const GsrConfig &) = default;
};

/// Convolutional analysis filterbank followed by rectification.
class SpeechEncoder {
 public:
  SpeechEncoder() = default;
  SpeechEncoder(nn::ParameterList *params, const std::string &name,
                const EncoderConfig &cfg, std::mt19937_64 *rng);
  /// T x channels non-negative embeddings.
  nn::Tensor Forward(std::span<const double> samples) const;
  const EncoderConfig &config() const { return cfg_; }

 private:
  EncoderConfig cfg_;
  nn::LinearLayer filters_;
};

/// Transposed-convolution synthesis: per-frame basis projection and
/// overlap-add, trimmed to the requested length.
class SpeechDecoder {
 public:
  SpeechDecoder() = default;
  SpeechDecoder(nn::ParameterList *params, const std::string &name,
                const EncoderConfig &cfg, std::mt19937_64 *rng);
  nn::Tensor Forward(const nn::Tensor &embeddings, size_t length) const;

 private:
  EncoderConfig cfg_;
  nn::LinearLayer basis_;
};

/// Index plumbing for splitting T frames into half-overlapping chunks.
struct ChunkLayout {
  int frames = 0, chunk = 0, hop = 0, num_chunks = 0;
  /// Row k * num_chunks + s <- frame s * hop + k - hop (-1 for padding).
  std::vector<int> intra_rows;
  std::vector<int> intra_to_inter;
  std::vector<int> inter_to_intra;

  static ChunkLayout Make(int frames, int chunk);
};

class DualPathStack {
 public:
  DualPathStack() = default;
  DualPathStack(nn::ParameterList *params, const std::string &name,
                const DualPathConfig &cfg, std::mt19937_64 *rng);
  /// T x bottleneck in and out.
  nn::Tensor Forward(const nn::Tensor &x) const;

 private:
  struct Path {
    nn::BiLstmLayer rnn;
    nn::LinearLayer proj;
    nn::LayerNormLayer norm;
  };
  DualPathConfig cfg_;
  std::vector<Path> intra_, inter_;
};

/// Recurrent gesture encoder with up-sampling to the speech frame rate.
class GestureEncoder {
 public:
  GestureEncoder() = default;
  GestureEncoder(nn::ParameterList *params, const std::string &name,
                 const GestureEncoderConfig &cfg, std::mt19937_64 *rng);
  /// Requires a spine-centred (normalised) pose with at most target_len
  /// frames; returns target_len x (2 * hidden).
  nn::Tensor Forward(const PoseSequence &pose, int target_len,
                     const nn::ForwardContext &ctx) const;
  int out_channels() const { return stack_.out_channels(); }

 private:
  nn::BiLstmStack stack_;
  bool speed_ = false;
};

/// Converts a pose to a T x 30 float matrix, or T x 40 with per-joint
/// speeds (zero at the first frame) appended.
nn::Matrix PoseMatrix(const PoseSequence &pose, bool with_speed = false);

/// Gesture-conditioned target speaker extractor.
class SegNet {
 public:
  explicit SegNet(const SegConfig &cfg);

  struct Output {
    nn::Tensor estimate;  // 1 x len(x)
    nn::Tensor mask;      // T x channels, non-negative
    nn::Tensor gesture;   // T x C_v
  };
  Output Forward(std::span<const double> mixture, const PoseSequence &pose,
                 const nn::ForwardContext &ctx) const;
  /// Eval-mode inference without graph construction.
  Waveform Extract(const Waveform &mixture, const PoseSequence &pose) const;
  /// Items are processed independently, so any item's output matches a
  /// batch-of-one call.
  std::vector<Waveform> ExtractBatch(const std::vector<Waveform> &mixtures,
                                     const std::vector<PoseSequence> &poses) const;

  const SegConfig &config() const { return cfg_; }
  nn::ParameterList &params() { return params_; }
  const nn::ParameterList &params() const { return params_; }
  static constexpr const char *kKind = "seg";

 private:
  SegConfig cfg_;
  nn::ParameterList params_;
  SpeechEncoder encoder_;
  nn::LayerNormLayer input_norm_;
  GestureEncoder gesture_;
  nn::LinearLayer fuse_;
  DualPathStack separator_;
  nn::LinearLayer mask_head_;
  SpeechDecoder decoder_;
};

/// Blind separator producing one stream per speaker.
class DprnnNet {
 public:
  explicit DprnnNet(const DprnnConfig &cfg);

  struct Output {
    std::vector<nn::Tensor> estimates;  // each 1 x len(x)
    std::vector<nn::Tensor> masks;
  };
  Output Forward(std::span<const double> mixture, int num_speakers) const;
  std::vector<Waveform> Separate(const Waveform &mixture, int num_speakers) const;

  const DprnnConfig &config() const { return cfg_; }
  nn::ParameterList &params() { return params_; }
  const nn::ParameterList &params() const { return params_; }
  static constexpr const char *kKind = "dprnn";

 private:
  DprnnConfig cfg_;
  nn::ParameterList params_;
  SpeechEncoder encoder_;
  nn::LayerNormLayer input_norm_;
  nn::LinearLayer bottleneck_;
  DualPathStack separator_;
  nn::LinearLayer mask_head_;
  SpeechDecoder decoder_;
};

/// Gesture-speech pairing classifier. Both branches are standardised over
/// time and projected to fusion_channels; the framewise concatenation of the
/// two projections and their product is mean-pooled and classified.
class GsrNet {
 public:
  explicit GsrNet(const GsrConfig &cfg);

  /// 1 x 1 pairing probability.
  nn::Tensor Forward(std::span<const double> speech, const PoseSequence &pose,
                     const nn::ForwardContext &ctx) const;
  double Score(const Waveform &speech, const PoseSequence &pose) const;

  const GsrConfig &config() const { return cfg_; }
  nn::ParameterList &params() { return params_; }
  const nn::ParameterList &params() const { return params_; }
  static constexpr const char *kKind = "gsr";

 private:
  struct ConvLayer {
    int dilation;
    nn::LinearLayer taps;
  };
  GsrConfig cfg_;
  nn::ParameterList params_;
  SpeechEncoder encoder_;
  std::vector<ConvLayer> convs_;
  GestureEncoder gesture_;
  nn::LinearLayer speech_proj_, gesture_proj_;
  nn::LinearLayer classify_;
};

}  // namespace gtse

#endif  // GTSE_MODELS_H_
