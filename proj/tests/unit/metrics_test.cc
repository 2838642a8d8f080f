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

#include "audiomark/metrics.h"

#include <cmath>
#include <limits>
#include <vector>

#include "audiomark/bits.h"
#include "audiomark/corpus.h"
#include "audiomark/errors.h"
#include "audiomark/perturbations.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiomark {
namespace {

TEST(SnrTest, IdenticalIsInfinite) {
  const Waveform w = testing::WhiteNoise(1000, 1);
  EXPECT_EQ(Snr(w, w), std::numeric_limits<double>::infinity());
}

TEST(SnrTest, EqualPowersGiveZeroDb) {
  Waveform w = testing::WhiteNoise(1000, 1);
  Waveform twice = w;
  for (double& x : twice.samples) x *= 2.0;
  EXPECT_NEAR(Snr(w, twice), 0.0, 1e-12);
}

TEST(SnrTest, SineWithNoiseAtExactPowerRatio) {
  const Waveform sine = testing::Sine(440.0, 1.0, 1.0);
  Waveform noise = testing::WhiteNoise(sine.size(), 2, 1.0);
  // Scale the noise to power 0.01 against the sine's measured power 0.5.
  double p = 0.0;
  for (double x : noise.samples) p += x * x;
  p /= noise.size();
  Waveform mixed = sine;
  for (size_t i = 0; i < sine.size(); ++i) {
    mixed.samples[i] += noise.samples[i] * std::sqrt(0.01 * 0.5 / p);
  }
  EXPECT_NEAR(Snr(sine, mixed), 20.0, 0.1);
}

TEST(SnrTest, Errors) {
  Waveform zero;
  zero.samples.assign(10, 0.0);
  Waveform one = zero;
  one.samples[3] = 1.0;
  try {
    Snr(zero, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedSnr);
  }
  Waveform shorter = one;
  shorter.samples.pop_back();
  try {
    Snr(one, shorter);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeError);
  }
}

TEST(BitwiseAccuracyTest, Arithmetic) {
  const WatermarkBits a = WatermarkBits::FromString("1011001110001111");
  EXPECT_EQ(BitwiseAccuracy(a, a), 1.0);
  EXPECT_EQ(BitwiseAccuracy(a, a.Complement()), 0.0);
  const WatermarkBits b = WatermarkBits::FromString("0111001110001111");
  EXPECT_EQ(BitwiseAccuracy(a, b), 0.875);
  EXPECT_THROW(BitwiseAccuracy(a, a.Slice(0, 4)), Error);
}

TEST(QualityProxyTest, IdentityScoresFive) {
  const Waveform clip = SynthesizeClip(Seed{5}, 1.0, 16000);
  EXPECT_DOUBLE_EQ(QualityProxy(clip, clip), 5.0);
}

TEST(QualityProxyTest, SilenceScoresLow) {
  const Waveform clip = SynthesizeClip(Seed{5}, 1.0, 16000);
  Waveform silence = clip;
  std::fill(silence.samples.begin(), silence.samples.end(), 0.0);
  const double q = QualityProxy(clip, silence);
  EXPECT_LT(q, 1.5);
  EXPECT_GE(q, 1.0);
}

TEST(QualityProxyTest, LessNoiseScoresHigher) {
  const Waveform clip = SynthesizeClip(Seed{6}, 1.0, 16000);
  PerturbationSpec spec;
  spec.kind = PerturbationKind::kGaussianNoise;
  spec.seed = Seed{1};
  spec.param = 40.0;
  const double q40 = QualityProxy(clip, Apply(spec, clip));
  spec.param = 10.0;
  const double q10 = QualityProxy(clip, Apply(spec, clip));
  EXPECT_GT(q40, q10);
}

TEST(RatesTest, CountArithmetic) {
  EXPECT_EQ(FalseNegativeRate({100, 0, 100, 0}), 0.0);
  EXPECT_EQ(FalsePositiveRate({100, 0, 100, 0}), 0.0);
  EXPECT_EQ(FalseNegativeRate({100, 100, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(FalseNegativeRate({100, 10, 100, 5}), 0.10);
  EXPECT_DOUBLE_EQ(FalsePositiveRate({100, 10, 100, 5}), 0.05);
  try {
    FalsePositiveRate({10, 1, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedRate);
  }
}

struct WelchFixture {
  std::vector<double> a, b;
  double t, df, p;
};

// Expected values from scipy.stats.ttest_ind(equal_var=False); df from the
// Welch-Satterthwaite formula in numpy (tests/oracles/make_fixtures.py).
const WelchFixture kWelch[] = {
    {{1, 2, 3, 4, 5}, {2, 4, 6, 8, 10, 12},
     -2.3763541031440183, 6.9722557297949335, 0.04928433820673049},
    {{0, 0, 1, 1, 1, 0, 1}, {1, 1, 1, 0, 1, 1, 1, 1},
     -1.2777982476048093, 10.19271228717059, 0.2296548553632517},
    {{3.1, 2.7, 3.9, 4.4, 3.3}, {5.2, 4.8, 6.1},
     -3.86584606710066, 4.376476194402054, 0.01523467560660595},
    {{10.5, 9.8, 11.2, 10.1, 10.9, 10.0}, {10.4, 10.6, 10.2, 10.8, 10.3, 10.5},
     -0.20751433915982542, 6.5108063794902415, 0.8419482372548671},
    {{-1.5, 0.2, 2.8, -0.7, 1.1, 0.4, -2.2, 0.9}, {0.1, -0.3, 0.25, 0.05},
     0.17505927489389753, 7.5860876562369945, 0.8656146865694456},
};

TEST(WelchTest, MatchesScipyFixtures) {
  for (const WelchFixture& f : kWelch) {
    const WelchResult r = WelchTTest(f.a, f.b);
    EXPECT_NEAR(r.t, f.t, 1e-6);
    EXPECT_NEAR(r.df, f.df, 1e-6);
    EXPECT_NEAR(r.p_value, f.p, 1e-6);
  }
}

TEST(WelchTest, IdenticalGroupsGivePOne) {
  const std::vector<double> a = {1, 2, 3, 4};
  const WelchResult r = WelchTTest(a, a);
  EXPECT_EQ(r.t, 0.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(WelchTest, SeparatedGaussiansAreSignificant) {
  Rng rng(Seed{77});
  std::vector<double> a(1000), b(1000);
  for (double& x : a) x = rng.Gaussian();
  for (double& x : b) x = 5.0 + rng.Gaussian();
  EXPECT_LT(WelchTTest(a, b).p_value, 1e-10);
}

TEST(WelchTest, DegenerateAndTooSmall) {
  const std::vector<double> zeros = {0, 0, 0}, ones = {1, 1, 1};
  try {
    WelchTTest(zeros, ones);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateVariance);
  }
  const std::vector<double> single = {1.0};
  EXPECT_THROW(WelchTTest(single, ones), Error);
}

}  // namespace
}  // namespace audiomark
