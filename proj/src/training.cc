// src/training.cc

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

#include "gtse/training.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include "gtse/error.h"
#include "gtse/objectives.h"
#include "json.hpp"

namespace gtse {

using Json = nlohmann::ordered_json;
using nn::ForwardContext;
using nn::Matrix;
using nn::Tensor;

const char *PolicyName(SchedulePolicy policy) {
  return policy == SchedulePolicy::kHalveOnPlateau ? "halve-on-plateau"
                                                   : "decay-each-epoch";
}

SchedulePolicy ParsePolicy(const std::string &name) {
  if (name == "halve-on-plateau") return SchedulePolicy::kHalveOnPlateau;
  if (name == "decay-each-epoch") return SchedulePolicy::kDecayEachEpoch;
  Fail(ErrorKind::kInvalidArgument, "unknown schedule policy '", name, "'");
}

const char *ActionName(ScheduleAction action) {
  switch (action) {
    case ScheduleAction::kContinue: return "continue";
    case ScheduleAction::kHalve: return "halve";
    case ScheduleAction::kStop: return "stop";
  }
  return "?";
}

ScheduleState ScheduleState::Initial(SchedulePolicy policy, double lr) {
  GTSE_REQUIRE(lr > 0.0 && std::isfinite(lr), "learning rate must be positive");
  ScheduleState s;
  s.lr = lr;
  s.policy = policy;
  return s;
}

ScheduleStep StepSchedule(const ScheduleState &state, double val_loss) {
  if (!std::isfinite(val_loss))
    Fail(ErrorKind::kDiverged, "validation loss became ", val_loss, " at epoch ",
         state.epoch + 1);
  GTSE_REQUIRE(state.lr > 0.0 && state.epochs_since_improvement >= 0,
               "invalid schedule state");
  ScheduleStep out{state, ScheduleAction::kContinue, false};
  ScheduleState &s = out.state;
  ++s.epoch;
  if (val_loss < s.best_val_loss) {
    s.best_val_loss = val_loss;
    s.epochs_since_improvement = 0;
    out.improved = true;
  } else {
    ++s.epochs_since_improvement;
  }
  const int stall = s.epochs_since_improvement;
  if (s.policy == SchedulePolicy::kHalveOnPlateau) {
    if (stall >= kHalveStopPatience) {
      out.action = ScheduleAction::kStop;
    } else if (stall > 0 && stall % kHalvePatience == 0) {
      s.lr *= 0.5;
      out.action = ScheduleAction::kHalve;
    }
  } else {
    if (stall >= kDecayStopPatience) {
      out.action = ScheduleAction::kStop;
    } else {
      s.lr *= kEpochDecay;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[8] = {'G', 'T', 'S', 'E', 'C', 'K', 'P', 'T'};

Json StatsToJson(const PoseStats &s) {
  return Json{{"mean", s.mean}, {"stddev", s.stddev}};
}

PoseStats StatsFromJson(const Json &j) {
  PoseStats s;
  s.mean = j.at("mean").get<JointStats>();
  s.stddev = j.at("stddev").get<JointStats>();
  return s;
}

Json ScheduleToJson(const ScheduleState &s) {
  Json j{{"lr", s.lr},
         {"best_val_loss", nullptr},
         {"epochs_since_improvement", s.epochs_since_improvement},
         {"epoch", s.epoch},
         {"policy", PolicyName(s.policy)}};
  if (std::isfinite(s.best_val_loss)) j["best_val_loss"] = s.best_val_loss;
  return j;
}

ScheduleState ScheduleFromJson(const Json &j) {
  ScheduleState s;
  s.lr = j.at("lr").get<double>();
  s.best_val_loss = j.at("best_val_loss").is_null()
                        ? std::numeric_limits<double>::infinity()
                        : j.at("best_val_loss").get<double>();
  s.epochs_since_improvement = j.at("epochs_since_improvement").get<int>();
  s.epoch = j.at("epoch").get<int>();
  s.policy = ParsePolicy(j.at("policy").get<std::string>());
  return s;
}

void WriteMatrix(std::ostream &os, const Matrix &m) {
  os.write(reinterpret_cast<const char *>(m.data()),
           static_cast<std::streamsize>(m.size() * sizeof(float)));
}

Matrix ReadMatrix(std::istream &is, Eigen::Index rows, Eigen::Index cols,
                  const std::string &path) {
  Matrix m(rows, cols);
  is.read(reinterpret_cast<char *>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(float)));
  if (!is) Fail(ErrorKind::kCheckpoint, "checkpoint ", path, " is truncated");
  return m;
}

}  // namespace

void SaveCheckpoint(const std::string &path, const Checkpoint &c) {
  Json config = Json::object();
  for (const auto &[k, v] : c.config.entries()) config[k] = v;
  Json params = Json::array();
  for (const NamedMatrix &p : c.params)
    params.push_back({{"name", p.name}, {"rows", p.value.rows()}, {"cols", p.value.cols()}});
  const bool has_adam = !c.adam_m.empty();
  GTSE_REQUIRE(!has_adam || (c.adam_m.size() == c.params.size() &&
                             c.adam_v.size() == c.params.size()),
               "optimizer state does not match the parameter list");
  Json header{{"kind", c.kind},
              {"config", config},
              {"pose_stats", c.pose_stats ? StatsToJson(*c.pose_stats) : Json(nullptr)},
              {"schedule", ScheduleToJson(c.schedule)},
              {"steps", c.steps},
              {"seed", c.seed},
              {"params", params},
              {"adam", {{"present", has_adam}, {"steps", c.adam_steps}}}};
  const std::string text = header.dump();

  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) Fail(ErrorKind::kIo, "cannot write checkpoint ", path);
    os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    const uint32_t version = kCheckpointVersion;
    const uint64_t len = text.size();
    os.write(reinterpret_cast<const char *>(&version), sizeof(version));
    os.write(reinterpret_cast<const char *>(&len), sizeof(len));
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const NamedMatrix &p : c.params) WriteMatrix(os, p.value);
    if (has_adam) {
      for (const Matrix &m : c.adam_m) WriteMatrix(os, m);
      for (const Matrix &v : c.adam_v) WriteMatrix(os, v);
    }
    if (!os) Fail(ErrorKind::kIo, "write failed for checkpoint ", path);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) Fail(ErrorKind::kIo, "cannot open checkpoint ", path);
  char magic[8];
  uint32_t version = 0;
  uint64_t len = 0;
  is.read(magic, sizeof(magic));
  is.read(reinterpret_cast<char *>(&version), sizeof(version));
  is.read(reinterpret_cast<char *>(&len), sizeof(len));
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    Fail(ErrorKind::kCheckpoint, path, " is not a checkpoint file");
  if (version != kCheckpointVersion)
    Fail(ErrorKind::kCheckpoint, "checkpoint ", path, " has version ", version,
         ", expected ", kCheckpointVersion);
  if (len > (1u << 28)) Fail(ErrorKind::kCheckpoint, "checkpoint header too large");
  std::string text(len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(len));
  if (!is) Fail(ErrorKind::kCheckpoint, "checkpoint ", path, " is truncated");

  Checkpoint c;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  bool has_adam = false;
  try {
    const Json h = Json::parse(text);
    c.kind = h.at("kind").get<std::string>();
    for (const auto &[k, v] : h.at("config").items()) c.config.Set(k, v.get<std::string>());
    if (!h.at("pose_stats").is_null()) c.pose_stats = StatsFromJson(h.at("pose_stats"));
    c.schedule = ScheduleFromJson(h.at("schedule"));
    c.steps = h.at("steps").get<long>();
    c.seed = h.at("seed").get<uint64_t>();
    for (const Json &p : h.at("params")) {
      c.params.push_back({p.at("name").get<std::string>(), Matrix()});
      shapes.emplace_back(p.at("rows").get<Eigen::Index>(), p.at("cols").get<Eigen::Index>());
    }
    has_adam = h.at("adam").at("present").get<bool>();
    c.adam_steps = h.at("adam").at("steps").get<long>();
  } catch (const Json::exception &e) {
    Fail(ErrorKind::kCheckpoint, "checkpoint ", path, " has a bad header: ", e.what());
  } catch (const Error &e) {
    Fail(ErrorKind::kCheckpoint, "checkpoint ", path, ": ", e.what());
  }
  for (size_t i = 0; i < c.params.size(); ++i)
    c.params[i].value = ReadMatrix(is, shapes[i].first, shapes[i].second, path);
  if (has_adam) {
    for (auto *moments : {&c.adam_m, &c.adam_v})
      for (const auto &[r, k] : shapes) moments->push_back(ReadMatrix(is, r, k, path));
  }
  is.peek();
  if (!is.eof()) Fail(ErrorKind::kCheckpoint, "checkpoint ", path, " has trailing bytes");
  return c;
}

std::vector<NamedMatrix> CaptureParameters(const nn::ParameterList &params) {
  std::vector<NamedMatrix> out;
  for (const nn::NamedParameter &p : params.items())
    out.push_back({p.name, p.tensor.value()});
  return out;
}

void RestoreParameters(const std::vector<NamedMatrix> &saved,
                       nn::ParameterList *params) {
  auto &items = params->items();
  if (saved.size() != items.size())
    Fail(ErrorKind::kCheckpoint, "checkpoint has ", saved.size(),
         " parameter tensors, network has ", items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    const Matrix &v = saved[i].value;
    if (saved[i].name != items[i].name || v.rows() != items[i].tensor.rows() ||
        v.cols() != items[i].tensor.cols())
      Fail(ErrorKind::kCheckpoint, "parameter ", i, " mismatch: checkpoint has ",
           saved[i].name, " ", v.rows(), "x", v.cols(), ", network has ",
           items[i].name, " ", items[i].tensor.rows(), "x", items[i].tensor.cols());
  }
  for (size_t i = 0; i < items.size(); ++i)
    items[i].tensor.mutable_value() = saved[i].value;
}

namespace {

template <typename Config>
Config ConfigFromCheckpoint(const Checkpoint &c, const char *kind,
                            const std::optional<Config> &expected) {
  if (c.kind != kind)
    Fail(ErrorKind::kCheckpoint, "checkpoint holds a '", c.kind, "' network, expected '",
         kind, "'");
  Config cfg;
  try {
    cfg = Config::FromKeyValues(c.config);
  } catch (const Error &e) {
    Fail(ErrorKind::kCheckpoint, "checkpoint config is invalid: ", e.what());
  }
  if (expected && !(*expected == cfg)) {
    std::string diff;
    const KeyValues want = expected->ToKeyValues(), have = cfg.ToKeyValues();
    for (const auto &[k, v] : want.entries())
      if (have.GetString(k, "") != v)
        diff += " " + k + " (checkpoint " + have.GetString(k, "?") + ", requested " + v + ")";
    Fail(ErrorKind::kCheckpoint, "checkpoint config does not match:", diff);
  }
  return cfg;
}

template <typename Net, typename Config>
LoadedModel<Net> LoadModel(const std::string &path, const std::optional<Config> &expected,
                           bool needs_stats) {
  LoadedModel<Net> out;
  out.checkpoint = LoadCheckpoint(path);
  const Config cfg = ConfigFromCheckpoint(out.checkpoint, Net::kKind, expected);
  if (needs_stats && !out.checkpoint.pose_stats)
    Fail(ErrorKind::kCheckpoint, "checkpoint ", path,
         " lacks pose normalisation statistics");
  out.net = std::make_unique<Net>(cfg);
  RestoreParameters(out.checkpoint.params, &out.net->params());
  out.pose_stats = out.checkpoint.pose_stats;
  return out;
}

}  // namespace

LoadedModel<SegNet> LoadSeg(const std::string &path,
                            const std::optional<SegConfig> &expected) {
  return LoadModel<SegNet>(path, expected, true);
}

LoadedModel<DprnnNet> LoadDprnn(const std::string &path,
                                const std::optional<DprnnConfig> &expected) {
  return LoadModel<DprnnNet>(path, expected, false);
}

LoadedModel<GsrNet> LoadGsr(const std::string &path,
                            const std::optional<GsrConfig> &expected) {
  return LoadModel<GsrNet>(path, expected, true);
}

// ---------------------------------------------------------------------------

SegExample MakeSegExample(const MaterializedMixture &m, const std::string &id) {
  return SegExample{id, m.example.mixture, m.target_pose, m.example.target};
}

DprnnExample MakeDprnnExample(const MaterializedMixture &m, const std::string &id) {
  return DprnnExample{id, m.example.mixture, m.example.Sources()};
}

PoseSequence PreparePose(const PoseSequence &raw, const PoseStats &stats) {
  return PoseStatsNormalize(SpineCenter(raw), stats.mean, stats.stddev);
}

PoseStats FitPoseStats(const std::vector<PoseSequence> &raw) {
  std::vector<PoseSequence> centred;
  for (const PoseSequence &p : raw) centred.push_back(SpineCenter(p));
  return ComputePoseStats(centred);
}

KeyValues TrainOptions::ToKeyValues() const {
  KeyValues kv;
  kv.Set("seed", std::to_string(seed));
  kv.Set("max_epochs", max_epochs);
  kv.Set("max_steps", std::to_string(max_steps));
  kv.Set("batch_size", batch_size);
  kv.Set("passes_per_epoch", passes_per_epoch);
  kv.Set("initial_lr", initial_lr);
  kv.Set("clip_norm", clip_norm);
  return kv;
}

TrainOptions TrainOptions::FromKeyValues(const KeyValues &kv, TrainOptions o) {
  try {
    o.seed = std::stoull(kv.GetString("seed", std::to_string(o.seed)));
    o.max_steps = std::stol(kv.GetString("max_steps", std::to_string(o.max_steps)));
  } catch (const std::exception &) {
    Fail(ErrorKind::kInvalidArgument, "seed and max_steps must be integers");
  }
  o.max_epochs = kv.GetInt("max_epochs", o.max_epochs);
  o.batch_size = kv.GetInt("batch_size", o.batch_size);
  o.passes_per_epoch = kv.GetInt("passes_per_epoch", o.passes_per_epoch);
  o.initial_lr = kv.GetDouble("initial_lr", o.initial_lr);
  o.clip_norm = kv.GetDouble("clip_norm", o.clip_norm);
  GTSE_REQUIRE(o.max_epochs >= 1 && o.batch_size >= 1 && o.passes_per_epoch >= 1 &&
                   o.max_steps >= 0,
               "training limits must be positive");
  return o;
}

namespace {

/// Network-specific pieces of the shared loop.
struct LoopSpec {
  std::string kind;
  KeyValues config;
  std::optional<PoseStats> pose_stats;
  SchedulePolicy policy;
  double default_lr;
  size_t train_size;
  /// Loss of one training item; may record a PIT mapping.
  std::function<Tensor(size_t, const ForwardContext &, std::vector<int> *)> item_loss;
  std::function<double()> validate;
  /// Called before each epoch; may refresh the training items.
  std::function<void(int)> begin_epoch = nullptr;
};

std::mt19937_64 EpochRng(uint64_t seed, int epoch, uint64_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(epoch), static_cast<uint32_t>(stream)};
  return std::mt19937_64(seq);
}

TrainResult RunLoop(nn::ParameterList *params, const LoopSpec &spec,
                    const TrainOptions &opts, const Checkpoint *resume) {
  GTSE_REQUIRE(spec.train_size > 0, "training set is empty");
  GTSE_REQUIRE(opts.batch_size >= 1 && opts.passes_per_epoch >= 1 && opts.max_epochs >= 1,
               "training limits must be positive");
  const double lr0 = opts.initial_lr > 0.0 ? opts.initial_lr : spec.default_lr;
  nn::Adam adam(params, {lr0, 0.9, 0.999, 1e-8, opts.clip_norm});

  TrainResult result;
  result.schedule = ScheduleState::Initial(spec.policy, lr0);
  if (resume) {
    if (resume->kind != spec.kind || !(resume->config == spec.config))
      Fail(ErrorKind::kCheckpoint, "resume checkpoint does not match this network");
    RestoreParameters(resume->params, params);
    if (!resume->adam_m.empty()) {
      adam.first_moments() = resume->adam_m;
      adam.second_moments() = resume->adam_v;
      adam.set_step_count(resume->adam_steps);
    }
    result.schedule = resume->schedule;
    result.steps = resume->steps;
    result.best_val_loss = resume->schedule.best_val_loss;
  }
  adam.set_lr(result.schedule.lr);

  auto snapshot = [&]() {
    Checkpoint c;
    c.kind = spec.kind;
    c.config = spec.config;
    c.pose_stats = spec.pose_stats;
    c.schedule = result.schedule;
    c.steps = result.steps;
    c.seed = opts.seed;
    c.params = CaptureParameters(*params);
    c.adam_steps = adam.step_count();
    c.adam_m = adam.first_moments();
    c.adam_v = adam.second_moments();
    return c;
  };
  const std::filesystem::path out_dir(opts.out_dir);
  if (!opts.out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    KeyValues resolved = spec.config.Prefixed(spec.kind + ".");
    resolved.Merge(opts.ToKeyValues().Prefixed("train."));
    resolved.Set("train.policy", std::string(PolicyName(spec.policy)));
    resolved.Set("train.resolved_lr", lr0);
    resolved.Save((out_dir / "resolved.conf").string());
  }
  result.best = resume ? *resume : snapshot();

  bool stop = false;
  while (!stop && result.schedule.epoch < opts.max_epochs) {
    const int epoch = result.schedule.epoch;
    std::mt19937_64 order_rng = EpochRng(opts.seed, epoch, 1);
    std::mt19937_64 dropout_rng = EpochRng(opts.seed, epoch, 2);
    const ForwardContext ctx{true, &dropout_rng};
    if (spec.begin_epoch) spec.begin_epoch(epoch);
    double epoch_loss = 0.0;
    long epoch_items = 0;
    for (int pass = 0; pass < opts.passes_per_epoch && !stop; ++pass) {
      std::vector<size_t> order(spec.train_size);
      std::iota(order.begin(), order.end(), size_t{0});
      std::shuffle(order.begin(), order.end(), order_rng);
      for (size_t b = 0; b < order.size() && !stop; b += opts.batch_size) {
        const size_t end = std::min(order.size(), b + opts.batch_size);
        params->ZeroGrad();
        double batch_loss = 0.0;
        std::vector<std::vector<int>> mappings;
        for (size_t i = b; i < end; ++i) {
          std::vector<int> mapping;
          Tensor loss = spec.item_loss(order[i], ctx, &mapping);
          const double value = loss.item();
          if (!std::isfinite(value))
            Fail(ErrorKind::kDiverged, "training loss became ", value, " at step ",
                 result.steps + 1, " on item ", order[i]);
          nn::Backward(loss);
          batch_loss += value;
          if (!mapping.empty()) mappings.push_back(std::move(mapping));
        }
        adam.Step(1.0 / static_cast<double>(end - b));
        ++result.steps;
        result.step_losses.push_back(batch_loss / static_cast<double>(end - b));
        if (!mappings.empty()) result.assignments.push_back(std::move(mappings));
        epoch_loss += batch_loss;
        epoch_items += static_cast<long>(end - b);
        if (opts.max_steps > 0 && result.steps >= opts.max_steps) stop = true;
      }
    }
    params->ZeroGrad();
    const double val = spec.validate();
    const ScheduleStep step = StepSchedule(result.schedule, val);
    result.schedule = step.state;
    adam.set_lr(result.schedule.lr);
    result.epochs.push_back({result.schedule.epoch, result.steps,
                             epoch_loss / static_cast<double>(epoch_items), val,
                             result.schedule.lr, step.action});
    if (opts.verbose)
      std::cerr << spec.kind << " epoch " << result.schedule.epoch << " steps "
                << result.steps << " train " << result.epochs.back().train_loss
                << " val " << val << " lr " << result.schedule.lr << " "
                << ActionName(step.action) << "\n";
    if (step.improved) {
      result.best_val_loss = val;
      result.best = snapshot();
      if (!opts.out_dir.empty()) SaveCheckpoint((out_dir / "best.ckpt").string(), result.best);
    }
    if (step.action == ScheduleAction::kStop) stop = true;
  }
  result.last = snapshot();
  if (!opts.out_dir.empty()) SaveCheckpoint((out_dir / "last.ckpt").string(), result.last);
  RestoreParameters(result.best.params, params);
  return result;
}

template <typename T, typename Fn>
double MeanOver(const std::vector<T> &items, Fn fn) {
  GTSE_REQUIRE(!items.empty(), "validation set is empty");
  double sum = 0.0;
  for (const T &item : items) sum += fn(item);
  return sum / static_cast<double>(items.size());
}

}  // namespace

double SegValidationLoss(const SegNet &net, const PoseStats &stats,
                         const std::vector<SegExample> &examples) {
  return MeanOver(examples, [&](const SegExample &e) {
    return NegSiSdrLoss(net.Extract(e.mixture, PreparePose(e.pose, stats)), e.target);
  });
}

double DprnnValidationLoss(const DprnnNet &net,
                           const std::vector<DprnnExample> &examples) {
  return MeanOver(examples, [&](const DprnnExample &e) {
    return PitLoss(net.Separate(e.mixture, static_cast<int>(e.sources.size())), e.sources)
        .loss;
  });
}

double GsrValidationLoss(const GsrNet &net, const PoseStats &stats,
                         const std::vector<GsrPair> &pairs) {
  return MeanOver(pairs, [&](const GsrPair &p) {
    return BceLoss({p.label, net.Score(p.speech, PreparePose(p.pose, stats))});
  });
}

double GsrAccuracy(const GsrNet &net, const PoseStats &stats,
                   const std::vector<GsrPair> &pairs, double threshold) {
  GTSE_REQUIRE(!pairs.empty(), "no pairs to score");
  int correct = 0;
  for (const GsrPair &p : pairs) {
    const int guess = net.Score(p.speech, PreparePose(p.pose, stats)) > threshold ? 1 : 0;
    correct += guess == p.label;
  }
  return 100.0 * correct / static_cast<double>(pairs.size());
}

TrainResult TrainSeg(SegNet *net, const std::vector<SegExample> &train,
                     const std::vector<SegExample> &validation,
                     const TrainOptions &opts, const Checkpoint *resume) {
  GTSE_REQUIRE(!train.empty(), "training manifest is empty");
  GTSE_REQUIRE(!validation.empty(), "validation set is empty");
  std::vector<PoseSequence> raw;
  for (const SegExample &e : train) raw.push_back(e.pose);
  const PoseStats stats =
      resume && resume->pose_stats ? *resume->pose_stats : FitPoseStats(raw);
  std::vector<PoseSequence> poses;
  for (const SegExample &e : train) poses.push_back(PreparePose(e.pose, stats));

  LoopSpec spec{SegNet::kKind, net->config().ToKeyValues(), stats,
                SchedulePolicy::kHalveOnPlateau, kSegInitialLr, train.size(),
                [&](size_t i, const ForwardContext &ctx, std::vector<int> *) {
                  const SegExample &e = train[i];
                  return nn::NegSiSdr(net->Forward(e.mixture.samples(), poses[i], ctx).estimate,
                                      e.target.samples());
                },
                [&] { return SegValidationLoss(*net, stats, validation); }};
  return RunLoop(&net->params(), spec, opts, resume);
}

TrainResult TrainDprnn(DprnnNet *net, const std::vector<DprnnExample> &train,
                       const std::vector<DprnnExample> &validation,
                       const TrainOptions &opts, const Checkpoint *resume) {
  GTSE_REQUIRE(!train.empty(), "training manifest is empty");
  GTSE_REQUIRE(!validation.empty(), "validation set is empty");
  const int n = net->config().num_speakers;
  for (const auto *set : {&train, &validation})
    for (const DprnnExample &e : *set)
      GTSE_REQUIRE(static_cast<int>(e.sources.size()) == n, "example ", e.id, " has ",
                   e.sources.size(), " sources but the separator expects ", n);

  LoopSpec spec{DprnnNet::kKind, net->config().ToKeyValues(), std::nullopt,
                SchedulePolicy::kHalveOnPlateau, kDprnnInitialLr, train.size(),
                [&](size_t i, const ForwardContext &, std::vector<int> *mapping) {
                  const DprnnExample &e = train[i];
                  DprnnNet::Output out = net->Forward(e.mixture.samples(), n);
                  std::vector<std::vector<double>> est, ref;
                  for (const Tensor &t : out.estimates) est.push_back(nn::ToVector(t));
                  for (const Waveform &s : e.sources) ref.push_back(s.vec());
                  const PitResult pit = PitLoss(est, ref);
                  *mapping = pit.assignment.mapping;
                  Tensor total;
                  for (int j = 0; j < n; ++j) {
                    Tensor l = nn::NegSiSdr(out.estimates[j], e.sources[mapping->at(j)].samples());
                    total = total.defined() ? nn::Add(total, l) : l;
                  }
                  return nn::Scale(total, 1.0f / static_cast<float>(n));
                },
                [&] { return DprnnValidationLoss(*net, validation); }};
  return RunLoop(&net->params(), spec, opts, resume);
}

TrainResult TrainGsr(GsrNet *net, const std::vector<GsrPair> &train,
                     const std::vector<GsrPair> &validation,
                     const TrainOptions &opts, const Checkpoint *resume) {
  GTSE_REQUIRE(!train.empty(), "training pair set is empty");
  GTSE_REQUIRE(!validation.empty(), "validation set is empty");
  std::vector<PoseSequence> raw;
  for (const GsrPair &p : train) raw.push_back(p.pose);
  const PoseStats stats =
      resume && resume->pose_stats ? *resume->pose_stats : FitPoseStats(raw);
  std::vector<PoseSequence> poses;
  for (const GsrPair &p : train) poses.push_back(PreparePose(p.pose, stats));

  LoopSpec spec{GsrNet::kKind, net->config().ToKeyValues(), stats,
                SchedulePolicy::kDecayEachEpoch, kGsrInitialLr, train.size(),
                [&](size_t i, const ForwardContext &ctx, std::vector<int> *) {
                  return nn::Bce(net->Forward(train[i].speech.samples(), poses[i], ctx),
                                 train[i].label);
                },
                [&] { return GsrValidationLoss(*net, stats, validation); }};
  return RunLoop(&net->params(), spec, opts, resume);
}

TrainResult TrainGsrFromPool(GsrNet *net, const std::vector<PoolItem> &pool,
                             const std::vector<GsrPair> &validation,
                             const TrainOptions &opts, const Checkpoint *resume) {
  GTSE_REQUIRE(pool.size() >= 2, "pairing needs at least two utterances");
  GTSE_REQUIRE(!validation.empty(), "validation set is empty");
  std::vector<PoseSequence> raw;
  for (const PoolItem &p : pool) raw.push_back(p.pose);
  const PoseStats stats =
      resume && resume->pose_stats ? *resume->pose_stats : FitPoseStats(raw);
  std::vector<GsrPair> pairs;
  std::vector<PoseSequence> poses;

  LoopSpec spec{GsrNet::kKind, net->config().ToKeyValues(), stats,
                SchedulePolicy::kDecayEachEpoch, kGsrInitialLr, 2 * pool.size(),
                [&](size_t i, const ForwardContext &ctx, std::vector<int> *) {
                  return nn::Bce(net->Forward(pairs[i].speech.samples(), poses[i], ctx),
                                 pairs[i].label);
                },
                [&] { return GsrValidationLoss(*net, stats, validation); },
                [&](int epoch) {
                  std::mt19937_64 rng = EpochRng(opts.seed, epoch, 3);
                  pairs = BalancedPairs(pool, rng());
                  poses.clear();
                  for (const GsrPair &p : pairs) poses.push_back(PreparePose(p.pose, stats));
                }};
  return RunLoop(&net->params(), spec, opts, resume);
}

}  // namespace gtse
