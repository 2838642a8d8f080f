// Copyright 2026 The Audiomark Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AUDIOMARK_TESTS_TEST_UTIL_H_
#define AUDIOMARK_TESTS_TEST_UTIL_H_

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "audiomark/audio.h"
#include "audiomark/random.h"

namespace audiomark::testing {

inline Waveform Sine(double hz, double seconds, double amplitude = 0.5,
                     int rate = kDefaultSampleRate) {
  Waveform w;
  w.sample_rate = rate;
  const size_t n = static_cast<size_t>(std::lround(seconds * rate));
  w.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    w.samples[i] = amplitude * std::sin(2 * std::numbers::pi * hz * i / rate);
  }
  return w;
}

inline Waveform WhiteNoise(size_t n, uint64_t seed, double sigma = 0.1,
                           int rate = kDefaultSampleRate) {
  Rng rng(Seed{seed});
  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(n);
  for (double& x : w.samples) x = sigma * rng.Gaussian();
  return w;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("audiomark_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double RelativeL2(const std::vector<double>& a,
                         const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

}  // namespace audiomark::testing

#endif  // AUDIOMARK_TESTS_TEST_UTIL_H_
