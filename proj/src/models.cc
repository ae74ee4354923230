// src/models.cc

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

#include "gtse/models.h"

#include <algorithm>
#include <cmath>

#include "gtse/error.h"

namespace gtse {

using nn::ForwardContext;
using nn::Matrix;
using nn::Tensor;

namespace {

void WriteEncoder(KeyValues *kv, const EncoderConfig &c) {
  kv->Set("encoder_kernel", c.kernel);
  kv->Set("encoder_stride", c.stride);
  kv->Set("encoder_channels", c.channels);
}

EncoderConfig ReadEncoder(const KeyValues &kv, EncoderConfig c) {
  c.kernel = kv.GetInt("encoder_kernel", c.kernel);
  c.stride = kv.GetInt("encoder_stride", c.stride);
  c.channels = kv.GetInt("encoder_channels", c.channels);
  return c;
}

void WriteDualPath(KeyValues *kv, const DualPathConfig &c) {
  kv->Set("bottleneck", c.bottleneck);
  kv->Set("hidden", c.hidden);
  kv->Set("mask_blocks", c.blocks);
  kv->Set("chunk_size", c.chunk);
}

DualPathConfig ReadDualPath(const KeyValues &kv, DualPathConfig c) {
  c.bottleneck = kv.GetInt("bottleneck", c.bottleneck);
  c.hidden = kv.GetInt("hidden", c.hidden);
  c.blocks = kv.GetInt("mask_blocks", c.blocks);
  c.chunk = kv.GetInt("chunk_size", c.chunk);
  return c;
}

void WriteGesture(KeyValues *kv, const GestureEncoderConfig &c) {
  kv->Set("gesture_layers", c.layers);
  kv->Set("gesture_hidden", c.hidden);
  kv->Set("gesture_dropout", c.dropout);
  kv->Set("gesture_speed_features", c.speed_features ? 1 : 0);
}

GestureEncoderConfig ReadGesture(const KeyValues &kv, GestureEncoderConfig c) {
  c.layers = kv.GetInt("gesture_layers", c.layers);
  c.hidden = kv.GetInt("gesture_hidden", c.hidden);
  c.dropout = kv.GetDouble("gesture_dropout", c.dropout);
  c.speed_features = kv.GetInt("gesture_speed_features", c.speed_features ? 1 : 0) != 0;
  return c;
}

uint64_t ReadSeed(const KeyValues &kv, uint64_t fallback) {
  const std::string s = kv.GetString("init_seed", std::to_string(fallback));
  try {
    return std::stoull(s);
  } catch (const std::exception &) {
    Fail(ErrorKind::kInvalidArgument, "init_seed must be an unsigned integer");
  }
}

/// Rows shifted by offset frames, zero beyond the edges.
std::vector<int> ShiftIndex(int frames, int offset) {
  std::vector<int> idx(frames);
  for (int t = 0; t < frames; ++t) {
    const int s = t + offset;
    idx[t] = s >= 0 && s < frames ? s : -1;
  }
  return idx;
}

}  // namespace

void EncoderConfig::Validate() const {
  GTSE_REQUIRE(kernel >= 1 && stride >= 1 && stride <= kernel,
               "encoder needs 1 <= stride <= kernel (got kernel ", kernel,
               ", stride ", stride, ")");
  GTSE_REQUIRE(channels >= 1, "encoder needs at least one channel");
}

int EncoderConfig::NumFrames(size_t len) const {
  GTSE_REQUIRE(len >= static_cast<size_t>(kernel), "input of ", len,
               " samples is shorter than the encoder kernel; need at least ",
               kernel);
  const size_t excess = len - kernel;
  return static_cast<int>((excess + stride - 1) / stride) + 1;
}

void DualPathConfig::Validate() const {
  GTSE_REQUIRE(bottleneck >= 1 && hidden >= 1 && blocks >= 1,
               "dual-path sizes must be positive");
  GTSE_REQUIRE(chunk >= 2, "chunk size must be at least 2");
}

void GestureEncoderConfig::Validate() const {
  GTSE_REQUIRE(layers >= 1, "gesture encoder needs at least one layer");
  GTSE_REQUIRE(hidden >= 1, "gesture hidden size must be positive");
  GTSE_REQUIRE(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
}

void SegConfig::Validate() const {
  encoder.Validate();
  separator.Validate();
  gesture.Validate();
}

KeyValues SegConfig::ToKeyValues() const {
  KeyValues kv;
  WriteEncoder(&kv, encoder);
  WriteDualPath(&kv, separator);
  WriteGesture(&kv, gesture);
  kv.Set("init_seed", std::to_string(init_seed));
  return kv;
}

SegConfig SegConfig::FromKeyValues(const KeyValues &kv) {
  SegConfig c;
  c.encoder = ReadEncoder(kv, c.encoder);
  c.separator = ReadDualPath(kv, c.separator);
  c.gesture = ReadGesture(kv, c.gesture);
  c.init_seed = ReadSeed(kv, c.init_seed);
  c.Validate();
  return c;
}

void DprnnConfig::Validate() const {
  encoder.Validate();
  separator.Validate();
  GTSE_REQUIRE(num_speakers == 2 || num_speakers == 3,
               "separator supports 2 or 3 speakers, got ", num_speakers);
}

KeyValues DprnnConfig::ToKeyValues() const {
  KeyValues kv;
  WriteEncoder(&kv, encoder);
  WriteDualPath(&kv, separator);
  kv.Set("num_speakers", num_speakers);
  kv.Set("init_seed", std::to_string(init_seed));
  return kv;
}

DprnnConfig DprnnConfig::FromKeyValues(const KeyValues &kv) {
  DprnnConfig c;
  c.encoder = ReadEncoder(kv, c.encoder);
  c.separator = ReadDualPath(kv, c.separator);
  c.num_speakers = kv.GetInt("num_speakers", c.num_speakers);
  c.init_seed = ReadSeed(kv, c.init_seed);
  c.Validate();
  return c;
}

void GsrConfig::Validate() const {
  encoder.Validate();
  gesture.Validate();
  GTSE_REQUIRE(conv_layers >= 0, "conv layer count must be non-negative");
  GTSE_REQUIRE(conv_kernel >= 1 && conv_kernel % 2 == 1,
               "conv kernel must be odd and positive");
  GTSE_REQUIRE(fusion_channels >= 1, "fusion width must be positive");
}

KeyValues GsrConfig::ToKeyValues() const {
  KeyValues kv;
  WriteEncoder(&kv, encoder);
  kv.Set("conv_layers", conv_layers);
  kv.Set("conv_kernel", conv_kernel);
  kv.Set("fusion_channels", fusion_channels);
  WriteGesture(&kv, gesture);
  kv.Set("init_seed", std::to_string(init_seed));
  return kv;
}

GsrConfig GsrConfig::FromKeyValues(const KeyValues &kv) {
  GsrConfig c;
  c.encoder = ReadEncoder(kv, c.encoder);
  c.conv_layers = kv.GetInt("conv_layers", c.conv_layers);
  c.conv_kernel = kv.GetInt("conv_kernel", c.conv_kernel);
  c.fusion_channels = kv.GetInt("fusion_channels", c.fusion_channels);
  c.gesture = ReadGesture(kv, c.gesture);
  c.init_seed = ReadSeed(kv, c.init_seed);
  c.Validate();
  return c;
}

// ---------------------------------------------------------------------------

SpeechEncoder::SpeechEncoder(nn::ParameterList *params, const std::string &name,
                             const EncoderConfig &cfg, std::mt19937_64 *rng)
    : cfg_(cfg),
      filters_(params, name + ".filters", cfg.kernel, cfg.channels, false, rng) {}

Tensor SpeechEncoder::Forward(std::span<const double> samples) const {
  const int frames = cfg_.NumFrames(samples.size());
  Matrix framed = Matrix::Zero(frames, cfg_.kernel);
  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * cfg_.stride;
    const size_t n = std::min<size_t>(cfg_.kernel, samples.size() - start);
    for (size_t k = 0; k < n; ++k)
      framed(t, static_cast<Eigen::Index>(k)) = static_cast<float>(samples[start + k]);
  }
  return nn::Relu(filters_.Forward(Tensor(std::move(framed))));
}

SpeechDecoder::SpeechDecoder(nn::ParameterList *params, const std::string &name,
                             const EncoderConfig &cfg, std::mt19937_64 *rng)
    : cfg_(cfg),
      basis_(params, name + ".basis", cfg.channels, cfg.kernel, false, rng) {}

Tensor SpeechDecoder::Forward(const Tensor &embeddings, size_t length) const {
  Tensor wave = nn::OverlapAdd(basis_.Forward(embeddings), cfg_.stride);
  GTSE_REQUIRE(wave.cols() >= static_cast<Eigen::Index>(length),
               "decoder produced ", wave.cols(), " samples, need ", length);
  return nn::SliceCols(wave, 0, static_cast<int>(length));
}

ChunkLayout ChunkLayout::Make(int frames, int chunk) {
  GTSE_REQUIRE(frames >= 1 && chunk >= 2, "bad chunk layout request");
  ChunkLayout l;
  l.frames = frames;
  l.chunk = chunk;
  l.hop = chunk / 2;
  const int min_len = frames + 2 * l.hop;
  const int padded =
      min_len <= chunk ? chunk
                       : chunk + (min_len - chunk + l.hop - 1) / l.hop * l.hop;
  l.num_chunks = (padded - chunk) / l.hop + 1;
  const int rows = chunk * l.num_chunks;
  l.intra_rows.resize(rows);
  l.intra_to_inter.resize(rows);
  l.inter_to_intra.resize(rows);
  for (int k = 0; k < chunk; ++k)
    for (int s = 0; s < l.num_chunks; ++s) {
      const int f = s * l.hop + k - l.hop;
      l.intra_rows[k * l.num_chunks + s] = f >= 0 && f < frames ? f : -1;
      l.intra_to_inter[s * chunk + k] = k * l.num_chunks + s;
      l.inter_to_intra[k * l.num_chunks + s] = s * chunk + k;
    }
  return l;
}

DualPathStack::DualPathStack(nn::ParameterList *params, const std::string &name,
                             const DualPathConfig &cfg, std::mt19937_64 *rng)
    : cfg_(cfg) {
  for (int b = 0; b < cfg.blocks; ++b) {
    for (auto [paths, tag] : {std::pair{&intra_, "intra"}, std::pair{&inter_, "inter"}}) {
      const std::string p = name + ".b" + std::to_string(b) + "." + tag;
      paths->push_back(
          Path{nn::BiLstmLayer(params, p + ".rnn", cfg.bottleneck, cfg.hidden, rng),
               nn::LinearLayer(params, p + ".proj", 2 * cfg.hidden, cfg.bottleneck,
                               true, rng),
               nn::LayerNormLayer(params, p + ".norm", cfg.bottleneck)});
    }
  }
}

Tensor DualPathStack::Forward(const Tensor &x) const {
  const ChunkLayout l = ChunkLayout::Make(static_cast<int>(x.rows()), cfg_.chunk);
  Tensor h = nn::GatherRows(x, l.intra_rows);
  for (size_t b = 0; b < intra_.size(); ++b) {
    const Path &ia = intra_[b];
    Tensor r = ia.norm.Forward(ia.proj.Forward(ia.rnn.Forward(h, l.chunk, l.num_chunks)));
    h = nn::Add(h, r);
    Tensor hi = nn::GatherRows(h, l.intra_to_inter);
    const Path &ie = inter_[b];
    r = ie.norm.Forward(ie.proj.Forward(ie.rnn.Forward(hi, l.num_chunks, l.chunk)));
    hi = nn::Add(hi, r);
    h = nn::GatherRows(hi, l.inter_to_intra);
  }
  return nn::ScatterAddRows(h, l.intra_rows, l.frames);
}

Matrix PoseMatrix(const PoseSequence &pose, bool with_speed) {
  const int frames = pose.num_frames();
  Matrix m = Matrix::Zero(frames, with_speed ? kPoseDims + kNumJoints : kPoseDims);
  const std::vector<double> &d = pose.data();
  for (int t = 0; t < frames; ++t) {
    for (int k = 0; k < kPoseDims; ++k)
      m(t, k) = static_cast<float>(d[static_cast<size_t>(t) * kPoseDims + k]);
    if (!with_speed || t == 0) continue;
    for (int j = 0; j < kNumJoints; ++j) {
      double sq = 0.0;
      for (int a = 0; a < 3; ++a) {
        const double step = pose.at(t, j, a) - pose.at(t - 1, j, a);
        sq += step * step;
      }
      m(t, kPoseDims + j) = static_cast<float>(std::sqrt(sq));
    }
  }
  return m;
}

GestureEncoder::GestureEncoder(nn::ParameterList *params, const std::string &name,
                               const GestureEncoderConfig &cfg,
                               std::mt19937_64 *rng)
    : stack_(params, name, cfg.speed_features ? kPoseDims + kNumJoints : kPoseDims,
             cfg.hidden, cfg.layers, static_cast<float>(cfg.dropout), rng),
      speed_(cfg.speed_features) {}

Tensor GestureEncoder::Forward(const PoseSequence &pose, int target_len,
                               const ForwardContext &ctx) const {
  GTSE_REQUIRE(MaxSpineOffset(pose) < 1e-6,
               "gesture encoder expects a spine-centred pose");
  Tensor h = stack_.Forward(Tensor(PoseMatrix(pose, speed_)), ctx);
  return nn::GatherRows(h, UpsampleIndexMap(pose.num_frames(), target_len));
}

// ---------------------------------------------------------------------------

SegNet::SegNet(const SegConfig &cfg) : cfg_(cfg) {
  cfg_.Validate();
  std::mt19937_64 rng(cfg_.init_seed);
  const int n = cfg_.encoder.channels;
  encoder_ = SpeechEncoder(&params_, "encoder", cfg_.encoder, &rng);
  input_norm_ = nn::LayerNormLayer(&params_, "input_norm", n);
  gesture_ = GestureEncoder(&params_, "gesture", cfg_.gesture, &rng);
  fuse_ = nn::LinearLayer(&params_, "fuse", n + gesture_.out_channels(),
                          cfg_.separator.bottleneck, true, &rng);
  separator_ = DualPathStack(&params_, "separator", cfg_.separator, &rng);
  mask_head_ = nn::LinearLayer(&params_, "mask", cfg_.separator.bottleneck, n,
                               true, &rng);
  decoder_ = SpeechDecoder(&params_, "decoder", cfg_.encoder, &rng);
}

SegNet::Output SegNet::Forward(std::span<const double> mixture,
                               const PoseSequence &pose,
                               const ForwardContext &ctx) const {
  Tensor emb = encoder_.Forward(mixture);
  const int frames = static_cast<int>(emb.rows());
  Output out;
  out.gesture = gesture_.Forward(pose, frames, ctx);
  Tensor fused = fuse_.Forward(nn::ConcatCols({input_norm_.Forward(emb), out.gesture}));
  out.mask = nn::Relu(mask_head_.Forward(separator_.Forward(fused)));
  out.estimate = decoder_.Forward(nn::Mul(out.mask, emb), mixture.size());
  return out;
}

Waveform SegNet::Extract(const Waveform &mixture, const PoseSequence &pose) const {
  nn::NoGradGuard guard;
  Output out = Forward(mixture.samples(), pose, {});
  return Waveform(nn::ToVector(out.estimate), mixture.sample_rate());
}

std::vector<Waveform> SegNet::ExtractBatch(
    const std::vector<Waveform> &mixtures,
    const std::vector<PoseSequence> &poses) const {
  GTSE_REQUIRE(mixtures.size() == poses.size(), "batch has ", mixtures.size(),
               " mixtures but ", poses.size(), " poses");
  std::vector<Waveform> out;
  for (size_t i = 0; i < mixtures.size(); ++i)
    out.push_back(Extract(mixtures[i], poses[i]));
  return out;
}

DprnnNet::DprnnNet(const DprnnConfig &cfg) : cfg_(cfg) {
  cfg_.Validate();
  std::mt19937_64 rng(cfg_.init_seed);
  const int n = cfg_.encoder.channels;
  encoder_ = SpeechEncoder(&params_, "encoder", cfg_.encoder, &rng);
  input_norm_ = nn::LayerNormLayer(&params_, "input_norm", n);
  bottleneck_ = nn::LinearLayer(&params_, "bottleneck", n,
                                cfg_.separator.bottleneck, true, &rng);
  separator_ = DualPathStack(&params_, "separator", cfg_.separator, &rng);
  mask_head_ = nn::LinearLayer(&params_, "mask", cfg_.separator.bottleneck,
                               n * cfg_.num_speakers, true, &rng);
  decoder_ = SpeechDecoder(&params_, "decoder", cfg_.encoder, &rng);
}

DprnnNet::Output DprnnNet::Forward(std::span<const double> mixture,
                                   int num_speakers) const {
  GTSE_REQUIRE(num_speakers == cfg_.num_speakers, "separator was built for ",
               cfg_.num_speakers, " speakers, asked for ", num_speakers);
  Tensor emb = encoder_.Forward(mixture);
  Tensor y = separator_.Forward(bottleneck_.Forward(input_norm_.Forward(emb)));
  Tensor masks = nn::Relu(mask_head_.Forward(y));
  const int n = cfg_.encoder.channels;
  Output out;
  for (int j = 0; j < num_speakers; ++j) {
    out.masks.push_back(nn::SliceCols(masks, j * n, n));
    out.estimates.push_back(
        decoder_.Forward(nn::Mul(out.masks.back(), emb), mixture.size()));
  }
  return out;
}

std::vector<Waveform> DprnnNet::Separate(const Waveform &mixture,
                                         int num_speakers) const {
  nn::NoGradGuard guard;
  Output out = Forward(mixture.samples(), num_speakers);
  std::vector<Waveform> streams;
  for (const Tensor &e : out.estimates)
    streams.emplace_back(nn::ToVector(e), mixture.sample_rate());
  return streams;
}

GsrNet::GsrNet(const GsrConfig &cfg) : cfg_(cfg) {
  cfg_.Validate();
  std::mt19937_64 rng(cfg_.init_seed);
  const int c = cfg_.encoder.channels;
  encoder_ = SpeechEncoder(&params_, "encoder", cfg_.encoder, &rng);
  for (int l = 0; l < cfg_.conv_layers; ++l)
    convs_.push_back(ConvLayer{1 << l, nn::LinearLayer(&params_,
                                                       "conv" + std::to_string(l),
                                                       c * cfg_.conv_kernel, c,
                                                       true, &rng)});
  gesture_ = GestureEncoder(&params_, "gesture", cfg_.gesture, &rng);
  const int f = cfg_.fusion_channels;
  speech_proj_ = nn::LinearLayer(&params_, "speech_proj", c, f, true, &rng);
  gesture_proj_ =
      nn::LinearLayer(&params_, "gesture_proj", gesture_.out_channels(), f, true, &rng);
  classify_ = nn::LinearLayer(&params_, "classify", 3 * f, 1, true, &rng);
}

Tensor GsrNet::Forward(std::span<const double> speech, const PoseSequence &pose,
                       const ForwardContext &ctx) const {
  Tensor h = encoder_.Forward(speech);
  const int frames = static_cast<int>(h.rows());
  const int half = cfg_.conv_kernel / 2;
  for (const ConvLayer &conv : convs_) {
    std::vector<Tensor> taps;
    for (int i = -half; i <= half; ++i)
      taps.push_back(nn::GatherRows(h, ShiftIndex(frames, i * conv.dilation)));
    h = nn::Add(h, nn::Relu(conv.taps.Forward(nn::ConcatCols(taps))));
  }
  Tensor hs = speech_proj_.Forward(nn::StandardizeCols(h));
  Tensor gs = gesture_proj_.Forward(
      nn::StandardizeCols(gesture_.Forward(pose, frames, ctx)));
  Tensor fused = nn::ConcatCols({hs, gs, nn::Mul(hs, gs)});
  return nn::Sigmoid(classify_.Forward(nn::MeanRows(fused)));
}

double GsrNet::Score(const Waveform &speech, const PoseSequence &pose) const {
  nn::NoGradGuard guard;
  return Forward(speech.samples(), pose, {}).item();
}

}  // namespace gtse
