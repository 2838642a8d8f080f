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

#ifndef AUDIOMARK_METRICS_H_
#define AUDIOMARK_METRICS_H_

#include <cstddef>
#include <span>

#include "audiomark/audio.h"
#include "audiomark/bits.h"

namespace audiomark {

// 10 log10(mean(ref^2) / mean((pert - ref)^2)). Returns +infinity when the
// signals are identical. Throws ShapeError on length or rate mismatch and
// UndefinedSnr when the reference is all zeros.
double Snr(std::span<const double> reference, std::span<const double> perturbed);
double Snr(const Waveform& reference, const Waveform& perturbed);

// Fraction of equal positions. Throws ShapeError on length mismatch.
double BitwiseAccuracy(const WatermarkBits& a, const WatermarkBits& b);

// Spectral-distance quality proxy on a 1..5 scale: 1 + 4 exp(-D / D0). D is
// the mean over frames of the energy-weighted RMS log-spectral difference in
// dB (cells weighted by reference power). D0 is fixed so that white Gaussian
// noise at 20 dB SNR on the synthetic corpus scores 3 at the median clip.
inline constexpr double kQualityReferenceDistanceDb = 1.526;

double LogSpectralDistance(const Waveform& reference, const Waveform& perturbed);
double QualityProxy(const Waveform& reference, const Waveform& perturbed);

struct QualityScore {
  double snr_db = 0.0;
  double proxy = 0.0;
};

// SNR plus the quality proxy. When AUDIOMARK_QUALITY_CMD is set, the proxy is
// replaced by the first number the command prints for the pair; "{ref}" and
// "{deg}" in the command are substituted with WAV paths (appended when
// absent).
QualityScore ScoreQuality(const Waveform& reference, const Waveform& perturbed);

struct DetectionCounts {
  size_t watermarked = 0;
  size_t missed = 0;  // watermarked but not detected
  size_t unwatermarked = 0;
  size_t false_alarms = 0;  // unwatermarked but detected
};

// Each throws UndefinedRate when its denominator is zero.
double FalseNegativeRate(const DetectionCounts& counts);
double FalsePositiveRate(const DetectionCounts& counts);

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Two-sided Welch's unequal-variance t-test. Both groups need at least two
// samples; throws DegenerateVariance when both groups have zero variance.
WelchResult WelchTTest(std::span<const double> a, std::span<const double> b);

}  // namespace audiomark

#endif  // AUDIOMARK_METRICS_H_
