// tests/test_util.h

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

#ifndef GTSE_TESTS_TEST_UTIL_H_
#define GTSE_TESTS_TEST_UTIL_H_

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gtse/signal.h"

namespace gtse::testing {

inline std::vector<double> RandomVector(std::mt19937_64 &rng, size_t n,
                                        double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (double &x : v) x = g(rng);
  return v;
}

inline Waveform RandomWave(std::mt19937_64 &rng, size_t n, double scale = 1.0) {
  return Waveform(RandomVector(rng, n, scale));
}

inline double Dot(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("gtse_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gtse::testing

#endif  // GTSE_TESTS_TEST_UTIL_H_
