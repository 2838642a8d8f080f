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

#include "audiomark/whitebox.h"

#include <cmath>
#include <vector>

#include "audiomark/corpus.h"
#include "audiomark/errors.h"
#include "audiomark/metrics.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiomark {
namespace {

constexpr SchemeKind kBuiltIn[] = {SchemeKind::kSpreadSpectrum,
                                   SchemeKind::kSyncPayload,
                                   SchemeKind::kProbability};

WatermarkBits Payload(uint64_t seed) {
  Rng rng(Seed{seed});
  return WatermarkBits::Random(16, rng);
}

Waveform Clip(uint64_t seed) { return SynthesizeClip(Seed{seed}, 1.0, 16000); }

std::vector<double> Scaled(const std::vector<double>& x, double a) {
  std::vector<double> out = x;
  for (double& v : out) v *= a;
  return out;
}

TEST(ScalingFactorTest, EqualPowersAtTwentyDb) {
  const Waveform s = testing::WhiteNoise(4000, 1);
  const std::vector<double>& delta = s.samples;  // snr = 0 dB
  EXPECT_DOUBLE_EQ(
      ScalingFactor(s.samples, delta, 20.0, RescaleMode::kPowerRatio), 100.0);
  const double r =
      ScalingFactor(s.samples, delta, 20.0, RescaleMode::kAmplitudeExact);
  EXPECT_DOUBLE_EQ(r, 10.0);
  Waveform attacked = s;
  for (size_t i = 0; i < s.size(); ++i) attacked.samples[i] += delta[i] / r;
  EXPECT_NEAR(Snr(s, attacked), 20.0, 1e-9);
}

TEST(ScalingFactorTest, PowerRatioOvershoots) {
  // snr = 10 dB: the printed factor 10^((20 - 10) / 10) = 10 divides the
  // amplitude, which lands at 2R - snr = 30 dB.
  const Waveform s = testing::WhiteNoise(4000, 2);
  const std::vector<double> delta = Scaled(s.samples, std::pow(10.0, -0.5));
  const double r = ScalingFactor(s.samples, delta, 20.0, RescaleMode::kPowerRatio);
  EXPECT_NEAR(r, 10.0, 1e-9);
  Waveform attacked = s;
  for (size_t i = 0; i < s.size(); ++i) attacked.samples[i] += delta[i] / r;
  EXPECT_NEAR(Snr(s, attacked), 30.0, 1e-9);
}

TEST(ScalingFactorTest, BudgetAlreadyMet) {
  const Waveform s = testing::WhiteNoise(4000, 3);
  const std::vector<double> delta = Scaled(s.samples, std::pow(10.0, -35.0 / 20));
  for (RescaleMode m : {RescaleMode::kPowerRatio, RescaleMode::kAmplitudeExact}) {
    EXPECT_EQ(ScalingFactor(s.samples, delta, 20.0, m), 1.0);
  }
  const std::vector<double> zero(s.size(), 0.0);
  EXPECT_EQ(ScalingFactor(s.samples, zero, 20.0, RescaleMode::kPowerRatio), 1.0);
  try {
    ScalingFactor(zero, delta, 20.0, RescaleMode::kPowerRatio);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUndefinedSnr);
  }
}

TEST(WhiteboxTest, UnwatermarkedInputSucceedsImmediately) {
  for (WhiteboxVariant v : {WhiteboxVariant::kGradientDescent, WhiteboxVariant::kIfgsm}) {
    const auto scheme = MakeScheme(DefaultSchemeConfig(SchemeKind::kSpreadSpectrum));
    const Waveform clean = Clip(1);
    WhiteboxConfig config;
    config.variant = v;
    const AttackResult r =
        WhiteboxRemove(clean, Payload(1), *scheme, scheme->threshold(), config);
    EXPECT_TRUE(r.success);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_EQ(r.perturbed.samples, clean.samples);
    EXPECT_TRUE(std::isinf(r.final_snr));
  }
}

TEST(WhiteboxTest, ForgingAnAlreadyMarkedClipSucceedsImmediately) {
  const auto scheme = MakeScheme(DefaultSchemeConfig(SchemeKind::kSyncPayload));
  const WatermarkBits wf = Payload(2);
  const Waveform marked = scheme->Embed(Clip(2), wf);
  const AttackResult r =
      WhiteboxForge(marked, wf, *scheme, scheme->threshold(), WhiteboxConfig{});
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.perturbed.samples, marked.samples);
}

TEST(WhiteboxTest, RemovalAndForgeryRespectTheBudget) {
  for (SchemeKind kind : kBuiltIn) {
    const auto scheme = MakeScheme(DefaultSchemeConfig(kind));
    for (WhiteboxVariant v :
         {WhiteboxVariant::kGradientDescent, WhiteboxVariant::kIfgsm}) {
      WhiteboxConfig config;
      config.variant = v;
      config.iterations = 200;
      for (uint64_t s = 3; s < 5; ++s) {
        const WatermarkBits w = Payload(s);
        const Waveform clip = Clip(s);
        const Waveform marked = scheme->Embed(clip, w);
        const AttackResult removed =
            WhiteboxRemove(marked, w, *scheme, scheme->threshold(), config);
        EXPECT_TRUE(removed.success) << scheme->name();
        EXPECT_GE(Snr(marked, removed.perturbed), 20.0 - 0.01);
        EXPECT_FALSE(Decide(scheme->family(),
                            scheme->Decode(removed.perturbed, w),
                            scheme->threshold()));
        const AttackResult forged =
            WhiteboxForge(clip, w, *scheme, scheme->threshold(), config);
        EXPECT_TRUE(forged.success) << scheme->name();
        EXPECT_GE(Snr(clip, forged.perturbed), 20.0 - 0.01);
        EXPECT_EQ(forged.queries_used, forged.iterations + 1);
      }
    }
  }
}

TEST(WhiteboxTest, ExternalSchemeHasNoGradient) {
  SchemeConfig c = DefaultSchemeConfig(SchemeKind::kExternal);
  c.name = "stub";
  c.command = "true";
  const auto scheme = MakeScheme(c);
  try {
    WhiteboxRemove(Clip(1), Payload(1), *scheme, 0.8, WhiteboxConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGradientUnavailable);
  }
}

TEST(WhiteboxTest, ConfigValidation) {
  WhiteboxConfig c;
  c.iterations = 0;
  EXPECT_THROW(c.Validate(), Error);
  c = WhiteboxConfig{};
  c.learning_rate = -1.0;
  EXPECT_THROW(c.Validate(), Error);
  EXPECT_EQ(ParseRescaleMode("power_ratio"), RescaleMode::kPowerRatio);
  EXPECT_THROW(ParseRescaleMode("loud"), Error);
}

}  // namespace
}  // namespace audiomark
