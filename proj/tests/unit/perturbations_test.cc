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

#include "audiomark/perturbations.h"

#include <cmath>
#include <filesystem>
#include <string>

#include "audiomark/corpus.h"
#include "audiomark/errors.h"
#include "audiomark/metrics.h"
#include "audiomark/wav_io.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiomark {
namespace {

Waveform Clip(uint64_t seed) { return SynthesizeClip(Seed{seed}, 1.0, 16000); }

PerturbationSpec Spec(PerturbationKind kind, double param, uint64_t seed = 1) {
  PerturbationSpec s;
  s.kind = kind;
  s.param = param;
  s.seed = Seed{seed};
  return s;
}

double Rms(const std::vector<double>& x, size_t from = 0) {
  double acc = 0.0;
  for (size_t i = from; i < x.size(); ++i) acc += x[i] * x[i];
  return std::sqrt(acc / (x.size() - from));
}

TEST(PerturbationTest, NoiseHitsTargetSnr) {
  for (PerturbationKind kind :
       {PerturbationKind::kGaussianNoise, PerturbationKind::kBackgroundNoise}) {
    for (double snr : {5.0, 20.0, 40.0}) {
      for (uint64_t seed : {1, 2, 3}) {
        const Waveform clip = Clip(seed);
        const Waveform noisy = Apply(Spec(kind, snr, seed), clip);
        EXPECT_NEAR(Snr(clip, noisy), snr, 0.01);
      }
    }
  }
}

TEST(PerturbationTest, QuantizationIsIdempotentAtMatchedLevels) {
  for (double levels : {4.0, 16.0, 64.0}) {
    const auto spec = Spec(PerturbationKind::kQuantization, levels);
    const Waveform once = Apply(spec, Clip(4));
    EXPECT_EQ(Apply(spec, once).samples, once.samples);
  }
}

TEST(PerturbationTest, LowpassRemovesToneAboveCutoff) {
  const Waveform tone = testing::Sine(6000.0, 1.0, 0.5);
  const Waveform out =
      Apply(Spec(PerturbationKind::kLowpassFilter, 0.25), tone);
  EXPECT_LT(Rms(out.samples, 2000), 0.05 * Rms(tone.samples, 2000));
}

TEST(PerturbationTest, HighpassKeepsToneAboveCutoff) {
  const Waveform tone = testing::Sine(6000.0, 1.0, 0.5);
  const Waveform out =
      Apply(Spec(PerturbationKind::kHighpassFilter, 0.25), tone);
  EXPECT_NEAR(Rms(out.samples, 2000), Rms(tone.samples, 2000), 0.01);
}

TEST(PerturbationTest, EveryBuiltInKindIsDeterministic) {
  const Waveform clip = Clip(9);
  for (PerturbationKind kind : kAllPerturbationKinds) {
    if (kind == PerturbationKind::kOpusExt || kind == PerturbationKind::kMp3Ext) {
      continue;
    }
    for (double p : DefaultParameterGrid(kind)) {
      const auto spec = Spec(kind, p, 5);
      const Waveform a = Apply(spec, clip);
      EXPECT_EQ(a.samples, Apply(spec, clip).samples) << spec.Label();
      EXPECT_EQ(a.sample_rate, clip.sample_rate);
      for (double v : a.samples) ASSERT_TRUE(std::isfinite(v)) << spec.Label();
      if (kind != PerturbationKind::kTimeStretch) {
        EXPECT_EQ(a.size(), clip.size()) << spec.Label();
      }
    }
  }
}

TEST(PerturbationTest, TimeStretchChangesLength) {
  const Waveform clip = Clip(2);
  const Waveform fast = Apply(Spec(PerturbationKind::kTimeStretch, 1.5), clip);
  EXPECT_NEAR(static_cast<double>(fast.size()), clip.size() / 1.5, 2.0);
}

TEST(PerturbationTest, OutOfRangeNamesTheRange) {
  try {
    Apply(Spec(PerturbationKind::kGaussianNoise, 80.0), Clip(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRangeError);
    EXPECT_NE(std::string(e.what()).find("[5, 40]"), std::string::npos)
        << e.what();
  }
  PerturbationSpec probe = Spec(PerturbationKind::kGaussianNoise, 120.0);
  probe.enforce_range = false;
  EXPECT_NO_THROW(Apply(probe, Clip(1)));
}

TEST(PipelineTest, SingleStageEqualsApply) {
  const Waveform clip = Clip(3);
  PerturbationPipeline p;
  p.stages.push_back(Spec(PerturbationKind::kSmooth, 10));
  EXPECT_EQ(ApplyPipeline(p, clip).samples,
            Apply(p.stages[0], clip).samples);
}

TEST(PipelineTest, IsSequentialComposition) {
  const Waveform clip = Clip(3);
  const PerturbationPipeline p = PerturbationPipeline::Parse(
      "# two stages\ngaussian_noise 20\nquantization 64\n", Seed{11});
  ASSERT_EQ(p.stages.size(), 2u);
  const Waveform manual = Apply(p.stages[1], Apply(p.stages[0], clip));
  EXPECT_EQ(ApplyPipeline(p, clip).samples, manual.samples);
}

TEST(PipelineTest, FailingStageIsReported) {
  PerturbationPipeline p;
  p.stages.push_back(Spec(PerturbationKind::kSmooth, 10));
  p.stages.push_back(Spec(PerturbationKind::kEcho, 5.0));
  try {
    ApplyPipeline(p, Clip(1));
    FAIL();
  } catch (const Error& e) {
    ASSERT_TRUE(e.stage().has_value());
    EXPECT_EQ(*e.stage(), 1);
  }
}

TEST(CodecTest, CopyStubIsBitExact) {
  CodecRegistry codecs;
  codecs.Register("mp3", "cp {in} {out} # {param}");
  const Waveform clip = ParseWav(EncodeWav(Clip(5)));
  const Waveform out = Apply(Spec(PerturbationKind::kMp3Ext, 16), clip, &codecs);
  EXPECT_EQ(out.samples, clip.samples);
}

TEST(CodecTest, FailingCommandCarriesStderr) {
  CodecRegistry codecs;
  codecs.Register("opus", "echo codec-broke >&2; exit 3 # {in} {out} {param}");
  try {
    Apply(Spec(PerturbationKind::kOpusExt, 64), Clip(5), &codecs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCodecError);
    EXPECT_NE(std::string(e.what()).find("codec-broke"), std::string::npos);
  }
}

TEST(CodecTest, UnconfiguredCodecIsUnavailable) {
  CodecRegistry empty;
  try {
    Apply(Spec(PerturbationKind::kMp3Ext, 16), Clip(5), &empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCodecUnavailable);
  }
}

TEST(CodecTest, RealEncoderBitrateOrdering) {
  const CodecRegistry env = CodecRegistry::FromEnvironment();
  if (!env.Has("mp3")) GTEST_SKIP() << "AUDIOMARK_CODEC_MP3 not set";
  const Waveform clip = Clip(6);
  const double low = Snr(clip, Apply(Spec(PerturbationKind::kMp3Ext, 8), clip, &env));
  const double high =
      Snr(clip, Apply(Spec(PerturbationKind::kMp3Ext, 40), clip, &env));
  EXPECT_LT(low, high);
}

}  // namespace
}  // namespace audiomark
