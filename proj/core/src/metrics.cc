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

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "audiomark/errors.h"
#include "audiomark/subprocess.h"
#include "audiomark/wav_io.h"

namespace audiomark {

double Snr(std::span<const double> reference,
           std::span<const double> perturbed) {
  if (reference.size() != perturbed.size()) {
    Fail(ErrorCode::kShapeError,
         "SNR needs equal lengths, got " + std::to_string(reference.size()) +
             " and " + std::to_string(perturbed.size()));
  }
  double signal = 0.0, noise = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    const double d = perturbed[i] - reference[i];
    signal += reference[i] * reference[i];
    noise += d * d;
  }
  if (signal == 0.0) Fail(ErrorCode::kUndefinedSnr, "reference is all zeros");
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / noise);
}

double Snr(const Waveform& reference, const Waveform& perturbed) {
  if (reference.sample_rate != perturbed.sample_rate) {
    Fail(ErrorCode::kShapeError, "SNR needs equal sample rates");
  }
  return Snr(std::span<const double>(reference.samples),
             std::span<const double>(perturbed.samples));
}

double BitwiseAccuracy(const WatermarkBits& a, const WatermarkBits& b) {
  if (a.size() != b.size() || a.empty()) {
    Fail(ErrorCode::kShapeError, "bit strings must be non-empty and equal length");
  }
  size_t equal = 0;
  for (size_t i = 0; i < a.size(); ++i) equal += a[i] == b[i];
  return static_cast<double>(equal) / a.size();
}

double LogSpectralDistance(const Waveform& reference,
                           const Waveform& perturbed) {
  if (reference.size() != perturbed.size() ||
      reference.sample_rate != perturbed.sample_rate) {
    Fail(ErrorCode::kShapeError, "quality proxy needs matching signals");
  }
  const ComplexSpectrogram r =
      StftComplex(reference.samples, reference.sample_rate);
  const ComplexSpectrogram p =
      StftComplex(perturbed.samples, perturbed.sample_rate);
  double peak = 0.0;
  for (const auto& v : r.values) peak = std::max(peak, std::norm(v));
  // Cells more than 80 dB below the reference peak are treated as silence.
  const double floor = std::max(peak * 1e-8, 1e-20);
  double total = 0.0;
  for (int f = 0; f < r.frames; ++f) {
    double acc = 0.0, weight = 0.0;
    for (int b = 0; b < r.bins; ++b) {
      const size_t i = r.Index(f, b);
      const double pr = std::norm(r.values[i]) + floor;
      const double d = 10.0 * std::log10(pr / (std::norm(p.values[i]) + floor));
      acc += pr * d * d;
      weight += pr;
    }
    total += std::sqrt(acc / weight);
  }
  return total / r.frames;
}

double QualityProxy(const Waveform& reference, const Waveform& perturbed) {
  const double d = LogSpectralDistance(reference, perturbed);
  return 1.0 + 4.0 * std::exp(-d / kQualityReferenceDistanceDb);
}

namespace {

double ExternalQuality(const std::string& command, const Waveform& reference,
                       const Waveform& perturbed) {
  TempDir dir;
  const auto ref_path = dir.File("ref.wav");
  const auto deg_path = dir.File("deg.wav");
  WriteWav(ref_path, reference);
  WriteWav(deg_path, perturbed);
  std::string cmd = command;
  if (cmd.find("{ref}") == std::string::npos &&
      cmd.find("{deg}") == std::string::npos) {
    cmd += " {ref} {deg}";
  }
  cmd = ReplaceAll(cmd, "{ref}", ShellQuote(ref_path.string()));
  cmd = ReplaceAll(cmd, "{deg}", ShellQuote(deg_path.string()));
  const ProcessResult result = RunShell(cmd, "", std::chrono::seconds(120));
  if (result.timed_out || result.exit_code != 0) {
    Fail(ErrorCode::kAdapterError,
         "quality command failed: " + result.err.substr(0, 500));
  }
  char* end = nullptr;
  const double value = std::strtod(result.out.c_str(), &end);
  if (end == result.out.c_str() || !std::isfinite(value)) {
    Fail(ErrorCode::kProtocolError,
         "quality command printed no number: " + result.out.substr(0, 200));
  }
  return value;
}

}  // namespace

QualityScore ScoreQuality(const Waveform& reference,
                          const Waveform& perturbed) {
  QualityScore score;
  score.snr_db = Snr(reference, perturbed);
  const char* command = std::getenv("AUDIOMARK_QUALITY_CMD");
  if (command != nullptr && *command != '\0') {
    score.proxy = ExternalQuality(command, reference, perturbed);
  } else {
    score.proxy = QualityProxy(reference, perturbed);
  }
  return score;
}

double FalseNegativeRate(const DetectionCounts& counts) {
  if (counts.watermarked == 0) {
    Fail(ErrorCode::kUndefinedRate, "no watermarked samples");
  }
  return static_cast<double>(counts.missed) / counts.watermarked;
}

double FalsePositiveRate(const DetectionCounts& counts) {
  if (counts.unwatermarked == 0) {
    Fail(ErrorCode::kUndefinedRate, "no unwatermarked samples");
  }
  return static_cast<double>(counts.false_alarms) / counts.unwatermarked;
}

namespace {

void MeanVar(std::span<const double> x, double& mean, double& var) {
  mean = 0.0;
  for (double v : x) mean += v;
  mean /= x.size();
  var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= (x.size() - 1);
}

}  // namespace

WelchResult WelchTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    Fail(ErrorCode::kInvalidArgument, "Welch test needs two samples per group");
  }
  double ma, va, mb, vb;
  MeanVar(a, ma, va);
  MeanVar(b, mb, vb);
  const double sa = va / a.size();
  const double sb = vb / b.size();
  const double se2 = sa + sb;
  if (!(se2 > 0.0)) {
    Fail(ErrorCode::kDegenerateVariance, "both groups have zero variance");
  }
  WelchResult result;
  result.t = (ma - mb) / std::sqrt(se2);
  result.df = se2 * se2 /
              (sa * sa / (a.size() - 1) + sb * sb / (b.size() - 1));
  const boost::math::students_t dist(result.df);
  result.p_value =
      2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(result.t)));
  result.p_value = std::min(1.0, result.p_value);
  return result;
}

}  // namespace audiomark
