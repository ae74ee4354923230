// tools/gtse.cc

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

// Command-line front end: corpus synthesis, manifests, training, extraction
// and evaluation. Exit codes: 0 success, 2 invalid arguments, 3 data
// integrity or I/O, 4 checkpoint, 5 divergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "gtse/corpus.h"
#include "gtse/error.h"
#include "gtse/pipeline.h"
#include "gtse/training.h"
#include "gtse/wav_io.h"

namespace gtse {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  uint64_t seed = 1;
  std::string out_dir;
  bool verbose = false;
};

KeyValues LoadConfig(const Common &c) {
  return c.config.empty() ? KeyValues() : KeyValues::Load(c.config);
}

// Config keys of one network section; init_seed follows --seed unless the
// file pins it.
KeyValues NetSection(const KeyValues &kv, const std::string &prefix, uint64_t seed) {
  KeyValues section = kv.Section(prefix);
  if (!section.Has("init_seed")) section.Set("init_seed", std::to_string(seed));
  return section;
}

TrainOptions MakeTrainOptions(const KeyValues &kv, const Common &c) {
  TrainOptions base;
  base.seed = c.seed;
  base.out_dir = c.out_dir;
  base.verbose = c.verbose;
  TrainOptions o = TrainOptions::FromKeyValues(kv.Section("train."), base);
  o.seed = c.seed;
  o.out_dir = c.out_dir;
  o.verbose = c.verbose;
  return o;
}

std::vector<double> ParseEdges(const std::string &text) {
  std::vector<double> edges;
  if (text.empty()) return edges;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      edges.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      Fail(ErrorKind::kInvalidArgument, "bad bin edge '", item, "'");
    }
  }
  return edges;
}

std::vector<PoolItem> LoadPool(const std::vector<UtteranceRecord> &records) {
  std::vector<PoolItem> pool;
  for (const UtteranceRecord &r : records)
    pool.push_back({r.id, ReadWav(r.audio_path), ReadPoseFile(r.pose_path)});
  return pool;
}

void PrintResult(const std::string &kind, const TrainResult &r) {
  std::cout << kind << ": epochs " << r.epochs.size() << ", steps " << r.steps
            << ", best validation loss " << r.best_val_loss << ", final lr "
            << r.schedule.lr << "\n";
}

// Checkpoints given with --checkpoint, keyed by the kind in their header.
std::map<std::string, std::string> CheckpointsByKind(const std::vector<std::string> &paths) {
  std::map<std::string, std::string> out;
  for (const std::string &p : paths) {
    const std::string kind = LoadCheckpoint(p).kind;
    if (out.count(kind))
      Fail(ErrorKind::kInvalidArgument, "two ", kind, " checkpoints given");
    out[kind] = p;
  }
  return out;
}

std::string Need(const std::map<std::string, std::string> &ckpts, const std::string &kind) {
  auto it = ckpts.find(kind);
  if (it == ckpts.end())
    Fail(ErrorKind::kInvalidArgument, "a ", kind, " checkpoint is required");
  return it->second;
}

// Runs "cmd estimate.wav reference.wav" and reads one number from stdout.
MetricFn ExternalMetric(const std::string &cmd, const std::string &scratch) {
  if (cmd.empty()) return nullptr;
  return [cmd, scratch](const Waveform &est, const Waveform &ref) {
    const fs::path dir(scratch);
    fs::create_directories(dir);
    const std::string e = (dir / "estimate.wav").string();
    const std::string r = (dir / "reference.wav").string();
    WriteWav(e, est);
    WriteWav(r, ref);
    const std::string line = cmd + " '" + e + "' '" + r + "'";
    FILE *pipe = popen(line.c_str(), "r");
    if (!pipe) Fail(ErrorKind::kIo, "cannot run '", cmd, "'");
    double value = 0.0;
    const int got = std::fscanf(pipe, "%lf", &value);
    const int status = pclose(pipe);
    if (got != 1 || status != 0)
      Fail(ErrorKind::kIo, "metric command '", cmd, "' did not print a number");
    return value;
  };
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  out << text;
  if (!out) Fail(ErrorKind::kIo, "cannot write ", path.string());
}

int Run(int argc, char **argv) {
  CLI::App app{"Gesture-cued target speaker extraction"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", common.config, "key = value settings file");
    sub->add_option("--seed", common.seed, "seed for every random choice");
    sub->add_option("--out-dir", common.out_dir, "output directory");
    sub->add_flag("-v,--verbose", common.verbose, "per-epoch progress on stderr");
  };

  // synth-corpus
  int speakers = 20, utterances = 10;
  double min_s = 2.0, max_s = 4.0, val_frac = 0.1, test_frac = 0.1;
  auto *synth = app.add_subcommand("synth-corpus", "write a synthetic gesture/speech corpus");
  add_common(synth);
  synth->add_option("--speakers", speakers);
  synth->add_option("--utterances", utterances, "utterances per speaker");
  synth->add_option("--min-seconds", min_s);
  synth->add_option("--max-seconds", max_s);
  synth->add_option("--val-frac", val_frac);
  synth->add_option("--test-frac", test_frac);

  // simulate-manifest
  std::string records_path, split_name = "train", manifest_out;
  int mixtures = 100, interferers = 1;
  auto *sim = app.add_subcommand("simulate-manifest", "draw a mixture manifest");
  add_common(sim);
  sim->add_option("--records", records_path)->required();
  sim->add_option("--split", split_name);
  sim->add_option("--mixtures", mixtures);
  sim->add_option("--interferers", interferers);
  sim->add_option("--manifest", manifest_out, "output manifest path")->required();

  // materialize
  std::string manifest_path;
  auto *mat = app.add_subcommand("materialize", "write mixtures and sources as WAV files");
  add_common(mat);
  mat->add_option("--manifest", manifest_path)->required();

  // train-*
  std::string val_path, resume_path;
  std::vector<std::string> checkpoints;
  auto *tseg = app.add_subcommand("train-seg", "train the pose-cued extractor");
  auto *tsep = app.add_subcommand("train-dprnn", "train the separator");
  for (CLI::App *sub : {tseg, tsep}) {
    add_common(sub);
    sub->add_option("--manifest", manifest_path, "training manifest")->required();
    sub->add_option("--val-manifest", val_path, "validation manifest")->required();
    sub->add_option("--resume", resume_path, "checkpoint to continue from");
  }
  auto *tgsr = app.add_subcommand("train-gsr", "train the gesture-speech pairing classifier");
  add_common(tgsr);
  std::string init_path, separated_val;
  tgsr->add_option("--records", records_path, "training utterances (clean training)");
  tgsr->add_option("--val-records", val_path, "validation utterances (clean training)");
  tgsr->add_option("--resume", resume_path);
  tgsr->add_option("--init", init_path, "clean-trained checkpoint to fine-tune on separated speech");
  tgsr->add_option("--manifest", manifest_path, "training mixtures (fine-tuning)");
  tgsr->add_option("--val-manifest", separated_val, "validation mixtures (fine-tuning)");
  tgsr->add_option("--checkpoint", checkpoints, "separator checkpoint (fine-tuning)");

  // extract
  std::string system_name = "seg", mixture_path, pose_path, output_path;
  int num_speakers = 2;
  auto *ext = app.add_subcommand("extract", "extract the target speaker from a mixture");
  add_common(ext);
  ext->add_option("--system", system_name)->check(CLI::IsMember({"seg", "cascade"}));
  ext->add_option("--mixture", mixture_path)->required();
  ext->add_option("--pose", pose_path)->required();
  ext->add_option("--checkpoint", checkpoints, "model checkpoint(s)")->required();
  ext->add_option("--num-speakers", num_speakers);
  ext->add_option("--output", output_path)->required();

  // score-pair
  std::string speech_path;
  auto *score = app.add_subcommand("score-pair", "probability that speech and pose belong together");
  add_common(score);
  score->add_option("--speech", speech_path)->required();
  score->add_option("--pose", pose_path)->required();
  score->add_option("--checkpoint", checkpoints)->required();

  // evaluate
  std::string bins_length = "2,4,6,8", bins_snr = "-5,0,5", pesq_cmd, stoi_cmd;
  bool allow_non_test = false;
  auto *eval = app.add_subcommand("evaluate", "score a system on a test manifest");
  add_common(eval);
  eval->add_option("--system", system_name)
      ->check(CLI::IsMember({"seg", "cascade", "dprnn-random", "dprnn-pit"}));
  eval->add_option("--manifest", manifest_path)->required();
  eval->add_option("--checkpoint", checkpoints, "model checkpoint(s)");
  eval->add_option("--bins-length", bins_length, "comma-separated edges in seconds");
  eval->add_option("--bins-snr", bins_snr, "comma-separated edges in dB");
  eval->add_option("--pesq-cmd", pesq_cmd, "external PESQ scorer: CMD est.wav ref.wav");
  eval->add_option("--stoi-cmd", stoi_cmd, "external STOI scorer: CMD est.wav ref.wav");
  eval->add_flag("--allow-non-test", allow_non_test, "permit train/validation entries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  const fs::path out(common.out_dir);
  auto require_out = [&] {
    if (common.out_dir.empty()) Fail(ErrorKind::kInvalidArgument, "--out-dir is required");
    fs::create_directories(out);
  };

  if (*synth) {
    require_out();
    const auto records = WriteSyntheticCorpus((out / "audio").string(), speakers, utterances,
                                              min_s, max_s, common.seed);
    WriteRecords((out / "all.jsonl").string(), records);
    const auto splits = SplitBySpeaker(records, val_frac, test_frac, common.seed);
    for (Split s : {Split::kTrain, Split::kValidation, Split::kTest})
      WriteRecords((out / (std::string(SplitName(s)) + ".jsonl")).string(),
                   splits[static_cast<int>(s)]);
    std::cout << "wrote " << records.size() << " utterances to " << out.string() << "\n";
  } else if (*sim) {
    const Manifest m = SimulateManifest(ReadRecords(records_path), mixtures, interferers,
                                        common.seed, ParseSplit(split_name));
    WriteManifest(manifest_out, m);
    std::cout << "wrote " << m.entries.size() << " mixtures to " << manifest_out << "\n";
  } else if (*mat) {
    require_out();
    const Manifest m = ReadManifest(manifest_path);
    for (const MixtureManifestEntry &e : m.entries) {
      const MaterializedMixture x = Materialize(e);
      const std::string stem = (out / e.mixture_id).string();
      WriteWav(stem + "_mix.wav", x.example.mixture);
      WriteWav(stem + "_target.wav", x.example.target);
      for (size_t i = 0; i < x.example.interferers.size(); ++i)
        WriteWav(stem + "_interferer" + std::to_string(i + 1) + ".wav", x.example.interferers[i]);
      WritePoseFile(stem + "_target.pose", x.target_pose);
    }
    std::cout << "materialized " << m.entries.size() << " mixtures\n";
  } else if (*tseg || *tsep) {
    const KeyValues kv = LoadConfig(common);
    const TrainOptions opts = MakeTrainOptions(kv, common);
    const Manifest train = ReadManifest(manifest_path);
    const Manifest val = ReadManifest(val_path);
    std::optional<Checkpoint> resume;
    if (!resume_path.empty()) resume = LoadCheckpoint(resume_path);
    if (*tseg) {
      SegNet net(SegConfig::FromKeyValues(NetSection(kv, "seg.", common.seed)));
      std::vector<SegExample> tr, va;
      for (const auto &e : train.entries) tr.push_back(MakeSegExample(Materialize(e), e.mixture_id));
      for (const auto &e : val.entries) va.push_back(MakeSegExample(Materialize(e), e.mixture_id));
      PrintResult("seg", TrainSeg(&net, tr, va, opts, resume ? &*resume : nullptr));
    } else {
      DprnnConfig cfg = DprnnConfig::FromKeyValues(NetSection(kv, "dprnn.", common.seed));
      DprnnNet net(cfg);
      std::vector<DprnnExample> tr, va;
      for (const auto &e : train.entries)
        tr.push_back(MakeDprnnExample(Materialize(e), e.mixture_id));
      for (const auto &e : val.entries) va.push_back(MakeDprnnExample(Materialize(e), e.mixture_id));
      PrintResult("dprnn", TrainDprnn(&net, tr, va, opts, resume ? &*resume : nullptr));
    }
  } else if (*tgsr && !init_path.empty()) {
    const KeyValues kv = LoadConfig(common);
    const TrainOptions opts = MakeTrainOptions(kv, common);
    if (manifest_path.empty() || separated_val.empty())
      Fail(ErrorKind::kInvalidArgument, "fine-tuning needs --manifest and --val-manifest");
    const Checkpoint start = LoadCheckpoint(init_path);
    const LoadedModel<GsrNet> gsr = LoadGsr(init_path);
    const LoadedModel<DprnnNet> dprnn = LoadDprnn(Need(CheckpointsByKind(checkpoints), DprnnNet::kKind));
    const Separator separate = DprnnSeparator(*dprnn.net);
    auto pairs = [&](const std::string &path) {
      std::vector<GsrPair> out;
      for (const MixtureManifestEntry &e : ReadManifest(path).entries)
        for (GsrPair &p : SeparatedPairs(Materialize(e), e.mixture_id, separate))
          out.push_back(std::move(p));
      return out;
    };
    const std::vector<GsrPair> train = pairs(manifest_path), val = pairs(separated_val);
    const TrainResult r = FineTuneGsrOnSeparated(gsr.net.get(), start, train, val, opts);
    PrintResult("gsr (separated)", r);
    std::cout << "validation accuracy " << GsrAccuracy(*gsr.net, *r.best.pose_stats, val) << "%\n";
  } else if (*tgsr) {
    if (records_path.empty() || val_path.empty())
      Fail(ErrorKind::kInvalidArgument, "train-gsr needs --records and --val-records");
    const KeyValues kv = LoadConfig(common);
    const TrainOptions opts = MakeTrainOptions(kv, common);
    GsrNet net(GsrConfig::FromKeyValues(NetSection(kv, "gsr.", common.seed)));
    const std::vector<PoolItem> pool = LoadPool(ReadRecords(records_path));
    const std::vector<GsrPair> val = BalancedPairs(LoadPool(ReadRecords(val_path)), common.seed);
    std::optional<Checkpoint> resume;
    if (!resume_path.empty()) resume = LoadCheckpoint(resume_path);
    const TrainResult r = TrainGsrFromPool(&net, pool, val, opts, resume ? &*resume : nullptr);
    PrintResult("gsr", r);
    std::cout << "validation accuracy " << GsrAccuracy(net, *r.best.pose_stats, val) << "%\n";
  } else if (*ext) {
    const Waveform mixture = ReadWav(mixture_path);
    const PoseSequence pose = ReadPoseFile(pose_path);
    const auto ckpts = CheckpointsByKind(checkpoints);
    Waveform result = mixture;
    if (system_name == "seg") {
      result = SegExtract(mixture, pose, Need(ckpts, SegNet::kKind));
    } else {
      const CascadeResult r = CascadeExtract(mixture, pose, Need(ckpts, DprnnNet::kKind),
                                             Need(ckpts, GsrNet::kKind), num_speakers);
      std::cout << "selected stream " << r.selected_index << " scores";
      for (double s : r.scores) std::cout << " " << s;
      std::cout << "\n";
      result = r.extracted;
    }
    WriteWav(output_path, result);
  } else if (*score) {
    const auto ckpts = CheckpointsByKind(checkpoints);
    const LoadedModel<GsrNet> gsr = LoadGsr(Need(ckpts, GsrNet::kKind));
    const GsrPair p = AlignPair(ReadPoseFile(pose_path), ReadWav(speech_path), 0, "", "");
    std::cout << GsrScorer(*gsr.net, *gsr.pose_stats)(p.speech, p.pose) << "\n";
  } else if (*eval) {
    require_out();
    const SystemKind system = ParseSystem(system_name);
    const Manifest manifest = ReadManifest(manifest_path);
    const auto ckpts = CheckpointsByKind(checkpoints);
    EvaluationOptions opts;
    opts.system = system;
    opts.seed = common.seed;
    opts.length_bins = ParseEdges(bins_length);
    opts.snr_bins = ParseEdges(bins_snr);
    opts.allow_non_test = allow_non_test;
    opts.pesq = ExternalMetric(pesq_cmd, (out / "scratch").string());
    opts.stoi = ExternalMetric(stoi_cmd, (out / "scratch").string());
    SystemModels models;
    models.num_speakers = manifest.num_interferers + 1;
    std::optional<LoadedModel<SegNet>> seg;
    std::optional<LoadedModel<DprnnNet>> dprnn;
    std::optional<LoadedModel<GsrNet>> gsr;
    if (system == SystemKind::kSeg) {
      seg = LoadSeg(Need(ckpts, SegNet::kKind));
      models.seg = seg->net.get();
      models.seg_stats = seg->pose_stats;
    } else {
      dprnn = LoadDprnn(Need(ckpts, DprnnNet::kKind));
      GTSE_REQUIRE(dprnn->net->config().num_speakers == models.num_speakers,
                   "separator was trained for ", dprnn->net->config().num_speakers,
                   " speakers but the manifest has ", models.num_speakers);
      models.separate = DprnnSeparator(*dprnn->net);
      if (system == SystemKind::kCascade) {
        gsr = LoadGsr(Need(ckpts, GsrNet::kKind));
        models.score = GsrScorer(*gsr->net, *gsr->pose_stats);
      }
    }
    const EvaluationReport report = EvaluateSystem(manifest, models, opts);
    WriteText(out / "report.json", ReportToJson(report));
    WriteText(out / "report.txt", ReportToText(report));
    std::cout << ReportToText(report);
  }
  return 0;
}

}  // namespace
}  // namespace gtse

int main(int argc, char **argv) {
  try {
    return gtse::Run(argc, argv);
  } catch (const gtse::Error &e) {
    std::cerr << "error (" << gtse::ErrorKindName(e.kind()) << "): " << e.what() << "\n";
    return gtse::ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
