// tests/metrics_test.cc

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
#include "gtse/metrics.h"
#include "gtse/objectives.h"
#include "test_util.h"

using namespace gtse;
using gtse::testing::RandomVector;

TEST_CASE("Sdr") {
  std::mt19937_64 rng(21);
  auto s = RandomVector(rng, 100);
  CHECK(Sdr(s, s) == kSiSdrCeilingDb);

  auto e = RandomVector(rng, 100);
  const double scale =
      std::sqrt(gtse::testing::Dot(s, s) / 10.0 / gtse::testing::Dot(e, e));
  std::vector<double> est(s);
  for (size_t i = 0; i < 100; ++i) est[i] += scale * e[i];
  CHECK(Sdr(est, s) == doctest::Approx(10.0).epsilon(1e-12));

  std::vector<double> twice(s);
  for (double &v : twice) v *= 2;
  CHECK(std::abs(Sdr(twice, s)) < 1e-12);

  CHECK_THROWS_AS(Sdr(s, std::vector<double>(100, 0.0)), Error);
}

TEST_CASE("Improvement") {
  std::mt19937_64 rng(22);
  Waveform s(RandomVector(rng, 400)), b(RandomVector(rng, 400));
  std::vector<double> mix(400);
  for (size_t i = 0; i < 400; ++i) mix[i] = s[i] + b[i];
  Waveform x(mix);
  MetricFn si = [](const Waveform &e, const Waveform &r) { return SiSdr(e, r); };
  MetricFn sd = [](const Waveform &e, const Waveform &r) { return Sdr(e, r); };
  CHECK(Improvement(si, x, s, x) == 0.0);
  CHECK(Improvement(sd, x, s, x) == 0.0);
  const double m = SiSdr(x, s);
  CHECK(Improvement(si, s, s, x) == kSiSdrCeilingDb - m);
  // with the clamp out of play the improvement of a near-perfect estimate is
  // the negated mixture baseline plus the estimate's own score
  std::vector<double> near(s.vec());
  near[0] += 1e-3;
  CHECK(Improvement(si, Waveform(near), s, x) ==
        doctest::Approx(SiSdr(Waveform(near), s) - m));
}

TEST_CASE("ExtractionAccuracy") {
  auto mk = [](std::vector<double> v) {
    std::vector<UtteranceScore> out;
    for (double x : v) out.push_back(MakeUtteranceScore("u", x, 0, 1, 0));
    return out;
  };
  CHECK(std::abs(ExtractionAccuracy(mk({5.0, -0.1, 0.2})) - 200.0 / 3.0) <= 1e-9);
  CHECK(ExtractionAccuracy(mk({1, 2, 3})) == 100.0);
  CHECK(ExtractionAccuracy(mk({0.0})) == 0.0);  // strict at zero
  CHECK_THROWS_AS(ExtractionAccuracy({}), Error);

  std::mt19937_64 rng(23);
  auto scores = mk(RandomVector(rng, 101));
  const double acc = ExtractionAccuracy(scores);
  std::shuffle(scores.begin(), scores.end(), rng);
  CHECK(ExtractionAccuracy(scores) == acc);
}

TEST_CASE("BreakdownReport") {
  SUBCASE("singleton") {
    auto r = BreakdownReport({MakeUtteranceScore("a", 4.5, 3.0, 2.0, 1.0)}, {5.0},
                             {0.0});
    CHECK(r.by_length[0].count == 1);
    CHECK(*r.by_length[0].mean_si_sdri == 4.5);
    CHECK(!r.by_length[1].mean_si_sdri.has_value());
    CHECK(r.by_snr[1].count == 1);
  }
  SUBCASE("partition over SNR") {
    auto r = BreakdownReport({MakeUtteranceScore("a", 2.0, 0, 1, -3.0),
                              MakeUtteranceScore("b", -1.0, 0, 1, 4.0)},
                             {}, {0.0});
    CHECK(*r.by_snr[0].mean_si_sdri == 2.0);
    CHECK(*r.by_snr[1].mean_si_sdri == -1.0);
    CHECK(*r.by_snr[0].accuracy_pct == 100.0);
    CHECK(*r.by_snr[1].accuracy_pct == 0.0);
  }
  SUBCASE("bimodal scores pile up at the histogram ends") {
    std::mt19937_64 rng(24);
    std::normal_distribution<double> jitter(0.0, 1.5);
    std::vector<UtteranceScore> scores;
    for (int i = 0; i < 200; ++i)
      scores.push_back(MakeUtteranceScore(
          "u" + std::to_string(i), (i % 2 ? 15.0 : -15.0) + jitter(rng), 0, 1, 0));
    auto r = BreakdownReport(scores, {}, {});
    CHECK(r.histogram.front() + r.histogram.back() == 200);
    CHECK(r.histogram.front() == 100);
  }
  SUBCASE("bin means recombine to the global mean") {
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> len(0.5, 15), snr(-10, 10);
    std::normal_distribution<double> sc(3, 8);
    std::vector<UtteranceScore> scores;
    for (int i = 0; i < 300; ++i)
      scores.push_back(MakeUtteranceScore("u", sc(rng), 0, len(rng), snr(rng)));
    auto r = BreakdownReport(scores, {2, 4, 6, 8, 10}, {-5, 0, 5});
    for (const auto *bins : {&r.by_length, &r.by_snr}) {
      double acc = 0;
      int n = 0;
      for (const BinStat &b : *bins)
        if (b.count) {
          acc += *b.mean_si_sdri * b.count;
          n += b.count;
        }
      CHECK(n == 300);
      CHECK(std::abs(acc / n - r.mean_si_sdri) <= 1e-9);
    }
  }
  SUBCASE("unsorted bins rejected") {
    CHECK_THROWS_AS(BreakdownReport({MakeUtteranceScore("a", 1, 1, 1, 1)}, {2, 1},
                                    {}),
                    Error);
  }
}

TEST_CASE("report serialisation") {
  std::mt19937_64 rng(26);
  std::normal_distribution<double> sc(0, 10);
  std::vector<UtteranceScore> scores;
  for (int i = 0; i < 40; ++i) {
    auto s = MakeUtteranceScore("m" + std::to_string(i), sc(rng), sc(rng),
                                1.0 + i * 0.1, sc(rng) / 2);
    if (i % 3 == 0) s.pesqi = 0.1 * i;
    scores.push_back(s);
  }
  auto r = BreakdownReport(scores, {2, 4}, {-5, 0, 5});
  r.system = "seg";
  r.extras.emplace_back("separation_si_sdri_db", 7.25);
  const std::string json = ReportToJson(r);
  CHECK(json.find("\"si_sdri_db\"") != std::string::npos);
  CHECK(json.find("\"accuracy_pct\"") != std::string::npos);
  CHECK(json.find("\"bins\"") != std::string::npos);
  EvaluationReport back = ReportFromJson(json);
  CHECK(back == r);
  CHECK(ReportToJson(back) == json);
  const std::string text = ReportToText(r);
  CHECK(text.find("sdr_variant = fixed-scale") != std::string::npos);
  CHECK(text.find("stoii = absent") != std::string::npos);
}
