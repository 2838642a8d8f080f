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

#ifndef AUDIOMARK_WATERMARK_H_
#define AUDIOMARK_WATERMARK_H_

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "audiomark/audio.h"
#include "audiomark/bits.h"
#include "audiomark/errors.h"
#include "audiomark/random.h"

namespace audiomark {

enum class SchemeKind { kSpreadSpectrum, kSyncPayload, kProbability, kExternal };

// How a detector turns its output into a decision.
//   kBitwise:      bitwise accuracy >= tau
//   kSyncBitwise:  sync pattern decoded exactly AND payload accuracy >= tau
//   kProbability:  detector probability > tau
enum class DetectorFamily { kBitwise, kSyncBitwise, kProbability };

std::string_view SchemeKindName(SchemeKind kind);
// Accepts the names above plus short aliases ("spread", "sync", "prob").
SchemeKind ParseSchemeKind(std::string_view name);
std::string_view DetectorFamilyName(DetectorFamily family);
DetectorFamily ParseDetectorFamily(std::string_view name);

struct SchemeConfig {
  std::string name;
  SchemeKind kind = SchemeKind::kSpreadSpectrum;
  size_t payload_bits = 16;
  // Target mean log-amplitude correlation of each carrier after embedding.
  double embed_strength = 0.04;
  // Soft-bit sigmoid sharpness.
  double sharpness = 8.0;
  double threshold = 0.875;
  WatermarkBits sync_pattern = WatermarkBits::FromString("10110010");
  // Secret key for the carrier allocation.
  Seed key{0x5eed5eed};
  StftParams stft;
  double band_low_hz = 1000.0;
  double band_high_hz = 6000.0;

  // kExternal only.
  std::string command;
  std::chrono::milliseconds timeout{60000};
  DetectorFamily external_family = DetectorFamily::kBitwise;
};

// Defaults per kind, including a detection threshold calibrated on the
// synthetic corpus.
SchemeConfig DefaultSchemeConfig(SchemeKind kind);

struct DetectionOutcome {
  WatermarkBits decoded;          // payload bits
  std::vector<double> soft_bits;  // payload soft bits in [0, 1]
  std::vector<double> correlations;  // every carrier, sync carriers first
  std::optional<bool> sync_matched;
  std::optional<double> probability;
  double score = 0.0;
  bool decision = false;
};

bool Decide(DetectorFamily family, const DetectionOutcome& outcome,
            double tau);

enum class LossKind {
  kCrossEntropy,  // binary cross-entropy of carrier soft bits vs a target
  kHingeAbove,    // max(0, P - tau)
  kHingeBelow,    // max(0, tau - P)
};

struct LossSpec {
  LossKind kind = LossKind::kCrossEntropy;
  // Carrier target for kCrossEntropy (see WatermarkScheme::CarrierTarget).
  WatermarkBits target;
  double tau = 0.0;
};

class WatermarkScheme {
 public:
  virtual ~WatermarkScheme() = default;

  virtual const SchemeConfig& config() const = 0;
  const std::string& name() const { return config().name; }
  DetectorFamily family() const;
  double threshold() const { return config().threshold; }

  // `strength_gain` scales the embedding strength for this call only.
  virtual Waveform Embed(const Waveform& signal, const WatermarkBits& bits,
                         double strength_gain = 1.0) const = 0;
  // `truth` is the payload used for the bitwise score; it may be empty for
  // the probability family.
  virtual DetectionOutcome Decode(const Waveform& signal,
                                  const WatermarkBits& truth) const = 0;
  bool Detect(const Waveform& signal, const WatermarkBits& truth) const {
    return Decode(signal, truth).decision;
  }

  // Bits the carriers should decode to for a payload: the sync pattern
  // followed by the payload for kSyncBitwise, the payload otherwise.
  WatermarkBits CarrierTarget(const WatermarkBits& payload) const;

  virtual bool SupportsGradient() const { return false; }
  virtual double Loss(const Waveform& signal, const LossSpec& loss) const;
  // Returns the loss and writes dL/dx into `gradient`. Throws
  // GradientUnavailable for schemes without an analytic gradient.
  virtual double LossAndGradient(const Waveform& signal, const LossSpec& loss,
                                 std::vector<double>* gradient) const;
  // Decode plus loss (and gradient when `gradient` is non-null) at one point.
  virtual DetectionOutcome Evaluate(const Waveform& signal,
                                    const WatermarkBits& truth,
                                    const LossSpec& loss, double* loss_value,
                                    std::vector<double>* gradient) const;
};

std::unique_ptr<WatermarkScheme> MakeScheme(const SchemeConfig& config);

// Built-in multiplicative STFT-amplitude scheme. Each carrier owns a set of
// time-frequency cells, grouped into sign-balanced quads so that a smooth
// host spectrum contributes little to the carrier statistic
//   c_i = mean_j m_j log|X_j| / unit
// with m_j = +-1. Embedding scales carrier amplitudes by (1 + g_i m_j) and
// adjusts g_i until the re-analysed statistic reaches the target strength.
class ReferenceScheme : public WatermarkScheme {
 public:
  explicit ReferenceScheme(SchemeConfig config);

  const SchemeConfig& config() const override { return config_; }
  Waveform Embed(const Waveform& signal, const WatermarkBits& bits,
                 double strength_gain = 1.0) const override;
  DetectionOutcome Decode(const Waveform& signal,
                          const WatermarkBits& truth) const override;
  bool SupportsGradient() const override { return true; }
  double Loss(const Waveform& signal, const LossSpec& loss) const override;
  double LossAndGradient(const Waveform& signal, const LossSpec& loss,
                         std::vector<double>* gradient) const override;
  DetectionOutcome Evaluate(const Waveform& signal, const WatermarkBits& truth,
                            const LossSpec& loss, double* loss_value,
                            std::vector<double>* gradient) const override;

  // Embeds into an analysed spectrogram; phase is left untouched.
  Spectrogram EmbedSpectrogram(const Spectrogram& host,
                               const WatermarkBits& bits,
                               double strength_gain = 1.0) const;

  size_t carrier_count() const;
  // Carrier statistics c_i (sync carriers first).
  std::vector<double> Correlations(const Waveform& signal) const;
  DetectionOutcome DecodeCorrelations(const std::vector<double>& c,
                                      const WatermarkBits& truth) const;

  struct Cell {
    int index;     // flat frame * bins + bin
    double sign;   // +1 or -1
  };
  struct Layout {
    int frames = 0;
    std::vector<std::vector<Cell>> carriers;
  };
  std::shared_ptr<const Layout> LayoutFor(int frames, int sample_rate) const;

  // Scale of c: a carrier embedded at the default strength reads +-1.
  static constexpr double kCorrelationUnit = 0.04;
  // Offset subtracted from mean |c| before the probability sigmoid.
  static constexpr double kProbabilityCentre = 0.75;
  // Amplitude floor inside the logarithm.
  static constexpr double kAmplitudeFloor = 1e-3;

 private:
  std::vector<double> RawStatistics(const ComplexSpectrogram& x,
                                    const Layout& layout) const;
  double Analyse(const Waveform& signal, const LossSpec& loss,
                 std::vector<double>* gradient,
                 std::vector<double>* correlations) const;

  SchemeConfig config_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

struct CalibrationPoint {
  double tau = 0.0;
  double fnr = 0.0;
  double fpr = 0.0;
};

struct CalibrationResult {
  double tau = 0.0;
  std::vector<CalibrationPoint> curve;
};

class CalibrationInfeasibleError : public Error {
 public:
  CalibrationInfeasibleError(const std::string& message,
                             std::vector<CalibrationPoint> curve)
      : Error(ErrorCode::kCalibrationInfeasible, message),
        curve_(std::move(curve)) {}
  const std::vector<CalibrationPoint>& curve() const { return curve_; }

 private:
  std::vector<CalibrationPoint> curve_;
};

std::vector<double> DefaultThresholdGrid(DetectorFamily family,
                                         size_t payload_bits);

// Smallest grid threshold with FNR < max_fnr and FPR < max_fpr. Throws
// CalibrationInfeasibleError (carrying the full curve) when none qualifies.
CalibrationResult CalibrateThreshold(
    DetectorFamily family, std::span<const DetectionOutcome> watermarked,
    std::span<const DetectionOutcome> unwatermarked,
    std::span<const double> grid, double max_fnr = 0.01,
    double max_fpr = 0.01);

CalibrationResult CalibrateThreshold(const WatermarkScheme& scheme,
                                     std::span<const Waveform> watermarked,
                                     std::span<const Waveform> unwatermarked,
                                     const WatermarkBits& payload,
                                     std::span<const double> grid);

double Sigmoid(double x);

}  // namespace audiomark

#endif  // AUDIOMARK_WATERMARK_H_
