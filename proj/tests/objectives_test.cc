// tests/objectives_test.cc

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
#include "gtse/objectives.h"
#include "oracles.h"
#include "test_util.h"

using namespace gtse;
using gtse::testing::RandomVector;

TEST_CASE("SiSdr known values") {
  std::vector<double> s{1, -1, 1, -1};
  std::vector<double> est(s);
  const std::vector<double> r{1, 1, -1, -1};
  for (size_t i = 0; i < 4; ++i) est[i] += 0.1 * r[i];
  // residual orthogonal to s with energy ratio 100
  CHECK(std::abs(SiSdr(est, s) - 20.0) <= 1e-6);
  CHECK(SiSdr(s, s) == kSiSdrCeilingDb);
  CHECK(NegSiSdrLoss(Waveform(s), Waveform(s)) == -kSiSdrCeilingDb);
  CHECK(std::abs(NegSiSdrLoss(Waveform(est), Waveform(s)) + 20.0) <= 1e-6);
}

TEST_CASE("SiSdr errors") {
  CHECK_THROWS_AS(SiSdr(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                  Error);
  try {
    SiSdr(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4});
    FAIL("constant reference must be degenerate");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kDegenerateSignal);
  }
  CHECK_THROWS_AS(SiSdr(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST_CASE("SiSdr invariances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c_dist(0.05, 20.0), k_dist(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = RandomVector(rng, 200), noise = RandomVector(rng, 200, 0.7);
    std::vector<double> est(200);
    for (size_t i = 0; i < 200; ++i) est[i] = s[i] + noise[i];
    const double base = SiSdr(est, s);
    const double c = c_dist(rng), k = k_dist(rng);
    std::vector<double> scaled(est), shifted(est);
    for (size_t i = 0; i < 200; ++i) {
      scaled[i] *= c;
      shifted[i] += k;
    }
    CHECK(std::abs(SiSdr(scaled, s) - base) <= 1e-6);
    CHECK(std::abs(SiSdr(shifted, s) - base) <= 1e-6);
  }
}

TEST_CASE("NegSiSdr gradient matches finite differences") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = RandomVector(rng, 48), est = RandomVector(rng, 48);
    for (size_t i = 0; i < 48; ++i) est[i] += s[i];
    auto analytic = NegSiSdrLossGrad(est, s);
    CHECK(analytic.loss == doctest::Approx(-SiSdr(est, s)));
    auto fd = gtse::testing::FiniteDifferenceGrad(
        [&](const std::vector<double> &x) { return NegSiSdrLossGrad(x, s).loss; },
        est, 1e-4);
    CHECK(gtse::testing::RelativeError(analytic.grad, fd) < 1e-4);
  }
  // saturated at the ceiling: no gradient
  std::vector<double> s{1, 2, -3, 0.5};
  for (double g : NegSiSdrLossGrad(s, s).grad) CHECK(g == 0.0);
}

TEST_CASE("PitLoss") {
  std::mt19937_64 rng(13);
  auto a = RandomVector(rng, 64), b = RandomVector(rng, 64);
  // make b orthogonal to a after mean removal
  auto center = [](std::vector<double> &v) {
    double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    for (double &x : v) x -= m;
  };
  center(a);
  center(b);
  const double proj = gtse::testing::Dot(a, b) / gtse::testing::Dot(a, a);
  for (size_t i = 0; i < 64; ++i) b[i] -= proj * a[i];

  SUBCASE("swapped outputs") {
    PitResult r = PitLoss(std::vector<std::vector<double>>{b, a},
                          std::vector<std::vector<double>>{a, b});
    CHECK(r.assignment.mapping == std::vector<int>{1, 0});
    CHECK(r.loss == -kSiSdrCeilingDb);
  }
  SUBCASE("identity") {
    PitResult r = PitLoss(std::vector<std::vector<double>>{a, b},
                          std::vector<std::vector<double>>{a, b});
    CHECK(r.assignment.mapping == std::vector<int>{0, 1});
    CHECK(r.loss == -kSiSdrCeilingDb);
    CHECK(r.assignment.per_pair_scores.size() == 2);
  }
  SUBCASE("ties resolve to the lexicographically smallest permutation") {
    PitResult r = PitLoss(std::vector<std::vector<double>>{a, a},
                          std::vector<std::vector<double>>{a, a});
    CHECK(r.assignment.mapping == std::vector<int>{0, 1});
  }
  SUBCASE("size limits") {
    std::vector<std::vector<double>> five(5, a);
    try {
      PitLoss(five, five);
      FAIL("n = 5 must be refused");
    } catch (const Error &e) {
      CHECK(e.kind() == ErrorKind::kUnsupportedSize);
    }
    CHECK_THROWS_AS(PitLoss(std::vector<std::vector<double>>{a},
                            std::vector<std::vector<double>>{a, b}),
                    Error);
  }
}

TEST_CASE("PitLoss equals brute force and is permutation equivariant") {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = 2 + trial % 3;
    std::vector<std::vector<double>> est, ref;
    for (size_t k = 0; k < n; ++k) {
      ref.push_back(RandomVector(rng, 80));
      est.push_back(RandomVector(rng, 80));
    }
    // bias estimates toward a hidden permutation of the references
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < 80; ++i) est[k][i] += ref[(k + 1) % n][i];

    PitResult r = PitLoss(est, ref);
    auto oracle = gtse::testing::BruteForcePitSearch(est, ref);
    CHECK(r.loss == oracle.loss);
    CHECK(r.assignment.mapping == oracle.mapping);

    std::vector<int> order(n);
    for (size_t k = 0; k < n; ++k) order[k] = static_cast<int>((k + 1) % n);
    std::vector<std::vector<double>> permuted;
    for (int k : order) permuted.push_back(est[k]);
    PitResult rp = PitLoss(permuted, ref);
    for (size_t k = 0; k < n; ++k)
      CHECK(rp.assignment.mapping[k] == r.assignment.mapping[order[k]]);
    CHECK(std::abs(rp.loss - r.loss) <= 1e-12 * std::abs(r.loss));
  }
}

TEST_CASE("BceLoss") {
  CHECK(BceLoss({1, 1.0}) <= 1e-6);
  CHECK(BceLoss({0, 1.0}) == doctest::Approx(-std::log(1e-7)).epsilon(1e-6));
  CHECK(BceLoss({0, 1.0}) == doctest::Approx(16.118).epsilon(1e-4));
  CHECK(BceLoss({1, 0.5}) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(BceLoss({0, 0.5}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(BceLoss({2, 0.5}), Error);
}

TEST_CASE("BceLoss is convex and its gradient matches finite differences") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> p(0.01, 0.99);
  for (int trial = 0; trial < 200; ++trial) {
    const int y = trial % 2;
    const double a = p(rng), b = p(rng);
    CHECK(BceLoss({y, 0.5 * (a + b)}) <=
          0.5 * (BceLoss({y, a}) + BceLoss({y, b})) + 1e-15);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const int y = trial % 2;
    const double x = p(rng);
    auto fd = gtse::testing::FiniteDifferenceGrad(
        [&](const std::vector<double> &v) { return BceLoss({y, v[0]}); }, {x},
        1e-4);
    CHECK(gtse::testing::RelativeError({BceLossGrad({y, x})}, fd) < 1e-4);
  }
}
