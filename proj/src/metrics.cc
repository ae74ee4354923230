// src/metrics.cc

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

#include "gtse/metrics.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "gtse/error.h"
#include "gtse/objectives.h"
#include "json.hpp"

namespace gtse {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckEdges(const std::vector<double> &edges, const char *what) {
  for (size_t i = 1; i < edges.size(); ++i)
    GTSE_REQUIRE(edges[i] > edges[i - 1], what,
                 " bin edges must be strictly increasing");
}

int BinIndex(const std::vector<double> &edges, double v) {
  return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), v) -
                          edges.begin());
}

std::vector<BinStat> Bin(const std::vector<UtteranceScore> &scores,
                         const std::vector<double> &edges,
                         double UtteranceScore::*key) {
  std::vector<BinStat> bins(edges.size() + 1);
  std::vector<double> sums(bins.size(), 0.0);
  std::vector<int> correct(bins.size(), 0);
  for (size_t b = 0; b < bins.size(); ++b) {
    bins[b].lo = b == 0 ? -kInf : edges[b - 1];
    bins[b].hi = b == edges.size() ? kInf : edges[b];
  }
  for (const UtteranceScore &s : scores) {
    const int b = BinIndex(edges, s.*key);
    bins[b].count++;
    sums[b] += s.si_sdri;
    correct[b] += s.correct ? 1 : 0;
  }
  for (size_t b = 0; b < bins.size(); ++b) {
    if (bins[b].count == 0) continue;
    bins[b].mean_si_sdri = sums[b] / bins[b].count;
    bins[b].accuracy_pct = 100.0 * correct[b] / bins[b].count;
  }
  return bins;
}

json Edge(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
json Opt(const std::optional<T> &v) {
  return v ? json(*v) : json(nullptr);
}

json BinsToJson(const std::vector<BinStat> &bins) {
  json arr = json::array();
  for (const BinStat &b : bins)
    arr.push_back({{"lo", Edge(b.lo)},
                   {"hi", Edge(b.hi)},
                   {"count", b.count},
                   {"si_sdri_db", Opt(b.mean_si_sdri)},
                   {"accuracy_pct", Opt(b.accuracy_pct)}});
  return arr;
}

std::string Fmt(double v, int prec = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

std::string FmtRange(const BinStat &b) {
  auto e = [](double v) {
    return std::isfinite(v) ? Fmt(v, 2) : std::string(v < 0 ? "-inf" : "+inf");
  };
  return "[" + e(b.lo) + ", " + e(b.hi) + ")";
}

}  // namespace

double Sdr(std::span<const double> estimate, std::span<const double> reference) {
  GTSE_REQUIRE(estimate.size() == reference.size(), "SDR length mismatch: ",
               estimate.size(), " vs ", reference.size());
  double ref_energy = 0.0, err_energy = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    ref_energy += reference[i] * reference[i];
    const double e = estimate[i] - reference[i];
    err_energy += e * e;
  }
  if (!(ref_energy > 0.0))
    Fail(ErrorKind::kDegenerateSignal, "SDR reference has zero energy");
  if (err_energy == 0.0) return kSiSdrCeilingDb;
  return std::clamp(10.0 * std::log10(ref_energy / err_energy),
                    -kSiSdrCeilingDb, kSiSdrCeilingDb);
}

double Sdr(const Waveform &estimate, const Waveform &reference) {
  return Sdr(estimate.samples(), reference.samples());
}

double Improvement(const MetricFn &metric, const Waveform &estimate,
                   const Waveform &reference, const Waveform &mixture) {
  GTSE_REQUIRE(estimate.size() == reference.size() &&
                   mixture.size() == reference.size(),
               "improvement needs equal-length signals");
  return metric(estimate, reference) - metric(mixture, reference);
}

UtteranceScore MakeUtteranceScore(std::string id, double si_sdri, double sdri,
                                  double utterance_len_s,
                                  double target_interference_snr_db) {
  UtteranceScore s;
  s.id = std::move(id);
  s.si_sdri = si_sdri;
  s.sdri = sdri;
  s.correct = si_sdri > 0.0;
  s.utterance_len_s = utterance_len_s;
  s.target_interference_snr_db = target_interference_snr_db;
  return s;
}

double ExtractionAccuracy(const std::vector<UtteranceScore> &scores) {
  GTSE_REQUIRE(!scores.empty(), "accuracy over an empty score list");
  size_t correct = 0;
  for (const UtteranceScore &s : scores) correct += s.si_sdri > 0.0 ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(scores.size());
}

std::vector<double> DefaultHistogramEdges() {
  return {-10.0, -5.0, 0.0, 5.0, 10.0};
}

EvaluationReport BreakdownReport(const std::vector<UtteranceScore> &scores,
                                 const std::vector<double> &length_bins,
                                 const std::vector<double> &snr_bins,
                                 const std::vector<double> &histogram_edges) {
  CheckEdges(length_bins, "length");
  CheckEdges(snr_bins, "SNR");
  CheckEdges(histogram_edges, "histogram");
  GTSE_REQUIRE(!scores.empty(), "cannot report on zero utterances");

  EvaluationReport r;
  r.per_utterance = scores;
  r.length_edges = length_bins;
  r.snr_edges = snr_bins;
  r.histogram_edges = histogram_edges;
  double si = 0.0, sd = 0.0, pesq = 0.0, stoi = 0.0;
  int n_pesq = 0, n_stoi = 0;
  for (const UtteranceScore &s : scores) {
    GTSE_REQUIRE(s.correct == (s.si_sdri > 0.0), "utterance ", s.id,
                 " has an inconsistent accuracy flag");
    si += s.si_sdri;
    sd += s.sdri;
    if (s.pesqi) { pesq += *s.pesqi; ++n_pesq; }
    if (s.stoii) { stoi += *s.stoii; ++n_stoi; }
  }
  const double n = static_cast<double>(scores.size());
  r.mean_si_sdri = si / n;
  r.mean_sdri = sd / n;
  if (n_pesq) r.mean_pesqi = pesq / n_pesq;
  if (n_stoi) r.mean_stoii = stoi / n_stoi;
  r.accuracy_pct = ExtractionAccuracy(scores);
  r.by_length = Bin(scores, length_bins, &UtteranceScore::utterance_len_s);
  r.by_snr = Bin(scores, snr_bins, &UtteranceScore::target_interference_snr_db);
  r.histogram.assign(histogram_edges.size() + 1, 0);
  for (const UtteranceScore &s : scores)
    r.histogram[BinIndex(histogram_edges, s.si_sdri)]++;
  return r;
}

std::string ReportToJson(const EvaluationReport &r) {
  json j;
  j["format"] = "gtse-report";
  j["version"] = 1;
  j["system"] = r.system;
  j["sdr_variant"] = r.sdr_variant;
  j["num_utterances"] = r.per_utterance.size();
  j["si_sdri_db"] = r.mean_si_sdri;
  j["sdri_db"] = r.mean_sdri;
  j["pesqi"] = Opt(r.mean_pesqi);
  j["stoii"] = Opt(r.mean_stoii);
  j["accuracy_pct"] = r.accuracy_pct;
  j["bins"] = {{"length_edges_s", r.length_edges},
               {"snr_edges_db", r.snr_edges},
               {"histogram_edges_db", r.histogram_edges},
               {"by_length", BinsToJson(r.by_length)},
               {"by_snr", BinsToJson(r.by_snr)},
               {"histogram_counts", r.histogram}};
  json extras = json::object();
  for (const auto &[k, v] : r.extras) extras[k] = v;
  j["extras"] = extras;
  json utts = json::array();
  for (const UtteranceScore &s : r.per_utterance)
    utts.push_back({{"id", s.id},
                    {"si_sdri_db", s.si_sdri},
                    {"sdri_db", s.sdri},
                    {"pesqi", Opt(s.pesqi)},
                    {"stoii", Opt(s.stoii)},
                    {"correct", s.correct},
                    {"length_s", s.utterance_len_s},
                    {"target_interference_snr_db", s.target_interference_snr_db}});
  j["per_utterance"] = utts;
  return j.dump(2);
}

EvaluationReport ReportFromJson(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    Fail(ErrorKind::kDataIntegrity, "malformed report JSON: ", e.what());
  }
  try {
    std::vector<UtteranceScore> scores;
    for (const json &u : j.at("per_utterance")) {
      UtteranceScore s;
      s.id = u.at("id").get<std::string>();
      s.si_sdri = u.at("si_sdri_db").get<double>();
      s.sdri = u.at("sdri_db").get<double>();
      if (!u.at("pesqi").is_null()) s.pesqi = u["pesqi"].get<double>();
      if (!u.at("stoii").is_null()) s.stoii = u["stoii"].get<double>();
      s.correct = u.at("correct").get<bool>();
      s.utterance_len_s = u.at("length_s").get<double>();
      s.target_interference_snr_db =
          u.at("target_interference_snr_db").get<double>();
      scores.push_back(std::move(s));
    }
    const json &bins = j.at("bins");
    EvaluationReport r = BreakdownReport(
        scores, bins.at("length_edges_s").get<std::vector<double>>(),
        bins.at("snr_edges_db").get<std::vector<double>>(),
        bins.at("histogram_edges_db").get<std::vector<double>>());
    r.system = j.at("system").get<std::string>();
    r.sdr_variant = j.at("sdr_variant").get<std::string>();
    for (const auto &[k, v] : j.at("extras").items())
      r.extras.emplace_back(k, v.get<double>());
    return r;
  } catch (const json::exception &e) {
    Fail(ErrorKind::kDataIntegrity, "report JSON missing fields: ", e.what());
  }
}

std::string ReportToText(const EvaluationReport &r) {
  std::ostringstream os;
  os << "system = " << r.system << "\n"
     << "sdr_variant = " << r.sdr_variant << "\n"
     << "num_utterances = " << r.per_utterance.size() << "\n"
     << "si_sdri_db = " << Fmt(r.mean_si_sdri) << "\n"
     << "sdri_db = " << Fmt(r.mean_sdri) << "\n"
     << "pesqi = " << (r.mean_pesqi ? Fmt(*r.mean_pesqi) : "absent") << "\n"
     << "stoii = " << (r.mean_stoii ? Fmt(*r.mean_stoii) : "absent") << "\n"
     << "accuracy_pct = " << Fmt(r.accuracy_pct, 2) << "\n";
  for (const auto &[k, v] : r.extras) os << k << " = " << Fmt(v) << "\n";
  auto table = [&os](const char *title, const std::vector<BinStat> &bins) {
    os << "\n# " << title << "\n"
       << std::left << std::setw(22) << "bin" << std::setw(8) << "count"
       << std::setw(14) << "si_sdri_db" << "accuracy_pct\n";
    for (const BinStat &b : bins) {
      os << std::left << std::setw(22) << FmtRange(b) << std::setw(8) << b.count
         << std::setw(14) << (b.mean_si_sdri ? Fmt(*b.mean_si_sdri) : "-")
         << (b.accuracy_pct ? Fmt(*b.accuracy_pct, 2) : "-") << "\n";
    }
  };
  table("by utterance length (s)", r.by_length);
  table("by target-interference SNR (dB)", r.by_snr);
  os << "\n# SI-SDRi histogram (dB)\n";
  for (size_t b = 0; b < r.histogram.size(); ++b) {
    BinStat range;
    range.lo = b == 0 ? -kInf : r.histogram_edges[b - 1];
    range.hi = b == r.histogram_edges.size() ? kInf : r.histogram_edges[b];
    os << std::left << std::setw(22) << FmtRange(range) << r.histogram[b] << "\n";
  }
  return os.str();
}

}  // namespace gtse
