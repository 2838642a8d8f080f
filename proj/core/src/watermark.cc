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

#include "audiomark/watermark.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "audiomark/external_scheme.h"
#include "audiomark/metrics.h"

namespace audiomark {
namespace {

// Frame and bin offsets inside a quad. Frames four hops apart do not overlap.
constexpr int kQuadFrameOffset = 4;
constexpr int kQuadBinOffset = 3;
// Re-analysis keeps roughly this fraction of a per-cell log-gain change.
constexpr double kEmbedSlope = 0.25;
constexpr double kMaxCellGain = 0.9;
constexpr int kEmbedIterations = 8;

}  // namespace

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string_view SchemeKindName(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kSpreadSpectrum: return "spread_spectrum";
    case SchemeKind::kSyncPayload: return "sync_payload";
    case SchemeKind::kProbability: return "probability";
    case SchemeKind::kExternal: return "external";
  }
  return "unknown";
}

SchemeKind ParseSchemeKind(std::string_view name) {
  if (name == "spread_spectrum" || name == "spread") {
    return SchemeKind::kSpreadSpectrum;
  }
  if (name == "sync_payload" || name == "sync") return SchemeKind::kSyncPayload;
  if (name == "probability" || name == "prob") return SchemeKind::kProbability;
  if (name == "external") return SchemeKind::kExternal;
  Fail(ErrorCode::kInvalidArgument,
       "unknown scheme kind '" + std::string(name) + "'");
}

std::string_view DetectorFamilyName(DetectorFamily family) {
  switch (family) {
    case DetectorFamily::kBitwise: return "bitwise";
    case DetectorFamily::kSyncBitwise: return "sync_bitwise";
    case DetectorFamily::kProbability: return "probability";
  }
  return "unknown";
}

DetectorFamily ParseDetectorFamily(std::string_view name) {
  if (name == "bitwise") return DetectorFamily::kBitwise;
  if (name == "sync_bitwise") return DetectorFamily::kSyncBitwise;
  if (name == "probability") return DetectorFamily::kProbability;
  Fail(ErrorCode::kInvalidArgument,
       "unknown detector family '" + std::string(name) + "'");
}

SchemeConfig DefaultSchemeConfig(SchemeKind kind) {
  SchemeConfig config;
  config.kind = kind;
  config.name = std::string(SchemeKindName(kind));
  switch (kind) {
    case SchemeKind::kSpreadSpectrum:
      config.threshold = 0.875;
      config.key = Seed{0x5eed0001};
      break;
    case SchemeKind::kSyncPayload:
      config.threshold = 0.0;
      config.key = Seed{0x5eed0002};
      break;
    case SchemeKind::kProbability:
      config.threshold = 0.15;
      config.key = Seed{0x5eed0003};
      break;
    case SchemeKind::kExternal:
      config.threshold = 0.875;
      break;
  }
  return config;
}

bool Decide(DetectorFamily family, const DetectionOutcome& outcome,
            double tau) {
  switch (family) {
    case DetectorFamily::kBitwise:
      return outcome.score >= tau;
    case DetectorFamily::kSyncBitwise:
      return outcome.sync_matched.value_or(false) && outcome.score >= tau;
    case DetectorFamily::kProbability:
      return outcome.probability.value_or(outcome.score) > tau;
  }
  return false;
}

DetectorFamily WatermarkScheme::family() const {
  const SchemeConfig& c = config();
  switch (c.kind) {
    case SchemeKind::kSpreadSpectrum: return DetectorFamily::kBitwise;
    case SchemeKind::kSyncPayload: return DetectorFamily::kSyncBitwise;
    case SchemeKind::kProbability: return DetectorFamily::kProbability;
    case SchemeKind::kExternal: return c.external_family;
  }
  return DetectorFamily::kBitwise;
}

WatermarkBits WatermarkScheme::CarrierTarget(
    const WatermarkBits& payload) const {
  if (family() == DetectorFamily::kSyncBitwise) {
    return config().sync_pattern.Concat(payload);
  }
  return payload;
}

double WatermarkScheme::Loss(const Waveform&, const LossSpec&) const {
  Fail(ErrorCode::kGradientUnavailable,
       "scheme '" + name() + "' has no analytic loss");
}

double WatermarkScheme::LossAndGradient(const Waveform&, const LossSpec&,
                                        std::vector<double>*) const {
  Fail(ErrorCode::kGradientUnavailable,
       "scheme '" + name() + "' has no analytic gradient");
}

DetectionOutcome WatermarkScheme::Evaluate(const Waveform& signal,
                                          const WatermarkBits& truth,
                                          const LossSpec& loss,
                                          double* loss_value,
                                          std::vector<double>* gradient) const {
  const double value = LossAndGradient(signal, loss, gradient);
  if (loss_value != nullptr) *loss_value = value;
  return Decode(signal, truth);
}

std::unique_ptr<WatermarkScheme> MakeScheme(const SchemeConfig& config) {
  if (config.kind == SchemeKind::kExternal) {
    return std::make_unique<ExternalScheme>(config);
  }
  return std::make_unique<ReferenceScheme>(config);
}

struct ReferenceScheme::Cache {
  std::mutex mu;
  std::map<std::pair<int, int>, std::shared_ptr<const Layout>> layouts;
};

ReferenceScheme::ReferenceScheme(SchemeConfig config)
    : config_(std::move(config)), cache_(std::make_shared<Cache>()) {
  if (config_.kind == SchemeKind::kExternal) {
    Fail(ErrorCode::kInvalidArgument, "external schemes use ExternalScheme");
  }
  if (config_.payload_bits == 0) {
    Fail(ErrorCode::kInvalidArgument, "payload must have at least one bit");
  }
  if (config_.kind == SchemeKind::kSyncPayload &&
      config_.sync_pattern.size() < 8) {
    Fail(ErrorCode::kInvalidArgument, "sync pattern needs at least 8 bits");
  }
  if (!(config_.band_low_hz > 0.0 && config_.band_high_hz > config_.band_low_hz)) {
    Fail(ErrorCode::kInvalidArgument, "invalid carrier band");
  }
  config_.stft.Validate();
  if (config_.name.empty()) config_.name = std::string(SchemeKindName(config_.kind));
}

size_t ReferenceScheme::carrier_count() const {
  return config_.payload_bits + (config_.kind == SchemeKind::kSyncPayload
                                     ? config_.sync_pattern.size()
                                     : 0);
}

std::shared_ptr<const ReferenceScheme::Layout> ReferenceScheme::LayoutFor(
    int frames, int sample_rate) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto key = std::make_pair(frames, sample_rate);
  auto it = cache_->layouts.find(key);
  if (it != cache_->layouts.end()) return it->second;

  const int n = config_.stft.window_size;
  const int bins = config_.stft.bins();
  const int b_lo = static_cast<int>(
      std::ceil(config_.band_low_hz * n / sample_rate));
  const int b_hi = std::min(
      bins - 1,
      static_cast<int>(std::floor(config_.band_high_hz * n / sample_rate)));
  std::vector<std::pair<int, int>> anchors;
  for (int f0 = 0; f0 + 2 * kQuadFrameOffset <= frames;
       f0 += 2 * kQuadFrameOffset) {
    for (int b0 = b_lo; b0 + 2 * kQuadBinOffset - 1 <= b_hi;
         b0 += 2 * kQuadBinOffset) {
      for (int df = 0; df < kQuadFrameOffset; ++df) {
        for (int db = 0; db < kQuadBinOffset; ++db) {
          anchors.emplace_back(f0 + df, b0 + db);
        }
      }
    }
  }
  const size_t carriers = carrier_count();
  if (anchors.size() < carriers) {
    Fail(ErrorCode::kSignalTooShort,
         "signal too short to host " + std::to_string(carriers) +
             " carriers");
  }
  Rng rng(DeriveSeed(config_.key, "carrier-allocation"));
  rng.Shuffle(anchors);
  auto layout = std::make_shared<Layout>();
  layout->frames = frames;
  layout->carriers.resize(carriers);
  for (size_t q = 0; q < anchors.size(); ++q) {
    const auto [f, b] = anchors[q];
    const double s = (rng.NextU64() >> 63) ? 1.0 : -1.0;
    auto& cells = layout->carriers[q % carriers];
    cells.push_back({f * bins + b, s});
    cells.push_back({(f + kQuadFrameOffset) * bins + b, -s});
    cells.push_back({f * bins + b + kQuadBinOffset, -s});
    cells.push_back({(f + kQuadFrameOffset) * bins + b + kQuadBinOffset, s});
  }
  cache_->layouts.emplace(key, layout);
  return layout;
}

std::vector<double> ReferenceScheme::RawStatistics(
    const ComplexSpectrogram& x, const Layout& layout) const {
  std::vector<double> raw(layout.carriers.size(), 0.0);
  constexpr double kFloor2 = kAmplitudeFloor * kAmplitudeFloor;
  // Signed log sums are taken as one log of a ratio per block of cells; a
  // block of 8 floored powers stays far inside double range.
  constexpr size_t kBlock = 8;
  for (size_t i = 0; i < layout.carriers.size(); ++i) {
    const std::vector<Cell>& cells = layout.carriers[i];
    double acc = 0.0;
    for (size_t start = 0; start < cells.size(); start += kBlock) {
      const size_t stop = std::min(cells.size(), start + kBlock);
      double num = 1.0;
      double den = 1.0;
      for (size_t j = start; j < stop; ++j) {
        const double p = std::norm(x.values[cells[j].index]) + kFloor2;
        if (cells[j].sign > 0.0) {
          num *= p;
        } else {
          den *= p;
        }
      }
      acc += 0.5 * std::log(num / den);
    }
    raw[i] = acc / cells.size();
  }
  return raw;
}

std::vector<double> ReferenceScheme::Correlations(
    const Waveform& signal) const {
  const ComplexSpectrogram x =
      StftComplex(signal.samples, signal.sample_rate, config_.stft);
  const auto layout = LayoutFor(x.frames, signal.sample_rate);
  std::vector<double> c = RawStatistics(x, *layout);
  for (double& v : c) v /= kCorrelationUnit;
  return c;
}

DetectionOutcome ReferenceScheme::DecodeCorrelations(
    const std::vector<double>& c, const WatermarkBits& truth) const {
  const size_t offset = c.size() - config_.payload_bits;
  DetectionOutcome out;
  out.correlations = c;
  std::vector<uint8_t> bits(config_.payload_bits);
  out.soft_bits.resize(config_.payload_bits);
  for (size_t i = 0; i < config_.payload_bits; ++i) {
    out.soft_bits[i] = Sigmoid(config_.sharpness * c[offset + i]);
    bits[i] = out.soft_bits[i] >= 0.5;
  }
  out.decoded = WatermarkBits(std::move(bits));

  const DetectorFamily fam = family();
  if (fam == DetectorFamily::kProbability) {
    double m = 0.0;
    for (size_t i = offset; i < c.size(); ++i) m += std::abs(c[i]);
    m /= config_.payload_bits;
    const double p = Sigmoid(config_.sharpness * (m - kProbabilityCentre));
    out.probability = p;
    out.score = p;
  } else {
    if (truth.size() != config_.payload_bits) {
      Fail(ErrorCode::kInvalidArgument,
           "bitwise detection needs a " +
               std::to_string(config_.payload_bits) + "-bit reference");
    }
    const double ba = BitwiseAccuracy(out.decoded, truth);
    if (fam == DetectorFamily::kSyncBitwise) {
      bool matched = true;
      for (size_t i = 0; i < offset; ++i) {
        const uint8_t bit = Sigmoid(config_.sharpness * c[i]) >= 0.5;
        matched = matched && bit == config_.sync_pattern[i];
      }
      out.sync_matched = matched;
      out.score = matched ? ba : 0.0;
    } else {
      out.score = ba;
    }
  }
  out.decision = Decide(fam, out, config_.threshold);
  return out;
}

DetectionOutcome ReferenceScheme::Decode(const Waveform& signal,
                                         const WatermarkBits& truth) const {
  return DecodeCorrelations(Correlations(signal), truth);
}

Spectrogram ReferenceScheme::EmbedSpectrogram(const Spectrogram& host,
                                              const WatermarkBits& bits,
                                              double strength_gain) const {
  if (bits.size() != config_.payload_bits) {
    Fail(ErrorCode::kInvalidArgument,
         "payload must have " + std::to_string(config_.payload_bits) +
             " bits, got " + std::to_string(bits.size()));
  }
  if (host.params != config_.stft) {
    Fail(ErrorCode::kInvalidArgument, "spectrogram uses foreign STFT params");
  }
  const double strength = config_.embed_strength * strength_gain;
  if (strength == 0.0) return host;

  const auto layout = LayoutFor(host.frames, host.sample_rate);
  const WatermarkBits target_bits = CarrierTarget(bits);
  const size_t carriers = layout->carriers.size();
  std::vector<double> target(carriers);
  for (size_t i = 0; i < carriers; ++i) {
    target[i] = strength * (target_bits[i] ? 1.0 : -1.0);
  }

  ComplexSpectrogram work = ToComplex(host);
  std::vector<std::complex<double>> phasor(work.values.size());
  for (size_t j = 0; j < phasor.size(); ++j) {
    phasor[j] = std::polar(1.0, host.phase[j]);
  }
  const std::vector<double> host_raw = RawStatistics(work, *layout);
  std::vector<double> gain(carriers);
  for (size_t i = 0; i < carriers; ++i) {
    gain[i] = std::clamp((target[i] - host_raw[i]) / kEmbedSlope,
                         -kMaxCellGain, kMaxCellGain);
  }

  Spectrogram out = host;
  for (int it = 0; it < kEmbedIterations; ++it) {
    for (size_t i = 0; i < carriers; ++i) {
      for (const Cell& cell : layout->carriers[i]) {
        out.amplitude[cell.index] =
            host.amplitude[cell.index] * (1.0 + gain[i] * cell.sign);
        work.values[cell.index] = out.amplitude[cell.index] * phasor[cell.index];
      }
    }
    const std::vector<double> synth = IstftComplex(work);
    const ComplexSpectrogram reanalysed =
        StftComplex(synth, host.sample_rate, config_.stft);
    const std::vector<double> raw = RawStatistics(reanalysed, *layout);
    double worst = 0.0;
    for (size_t i = 0; i < carriers; ++i) {
      worst = std::max(worst, std::abs(target[i] - raw[i]));
    }
    if (worst <= 0.01 * std::abs(strength) || it + 1 == kEmbedIterations) {
      break;
    }
    for (size_t i = 0; i < carriers; ++i) {
      gain[i] = std::clamp(gain[i] + (target[i] - raw[i]) / kEmbedSlope,
                           -kMaxCellGain, kMaxCellGain);
    }
  }
  return out;
}

Waveform ReferenceScheme::Embed(const Waveform& signal,
                                const WatermarkBits& bits,
                                double strength_gain) const {
  if (config_.embed_strength * strength_gain == 0.0) {
    if (bits.size() != config_.payload_bits) {
      Fail(ErrorCode::kInvalidArgument, "payload length mismatch");
    }
    return signal;
  }
  const Spectrogram host = Stft(signal, config_.stft);
  return Istft(EmbedSpectrogram(host, bits, strength_gain));
}

namespace {

struct LossTerms {
  double loss = 0.0;
  std::vector<double> dldc;
};

LossTerms EvaluateLoss(const std::vector<double>& c, size_t payload_offset,
                       double k, const LossSpec& spec) {
  LossTerms out;
  out.dldc.assign(c.size(), 0.0);
  constexpr double kClampLo = 1e-12;
  constexpr double kClampHi = 1.0 - 1e-12;
  switch (spec.kind) {
    case LossKind::kCrossEntropy: {
      if (spec.target.size() != c.size()) {
        Fail(ErrorCode::kInvalidArgument,
             "cross-entropy target must cover every carrier (" +
                 std::to_string(c.size()) + " bits)");
      }
      for (size_t i = 0; i < c.size(); ++i) {
        const double q = Sigmoid(k * c[i]);
        const double qc = std::clamp(q, kClampLo, kClampHi);
        const double t = spec.target[i];
        out.loss -= t * std::log(qc) + (1.0 - t) * std::log(1.0 - qc);
        if (q == qc) out.dldc[i] = k * (q - t);
      }
      break;
    }
    case LossKind::kHingeAbove:
    case LossKind::kHingeBelow: {
      const size_t n = c.size() - payload_offset;
      double m = 0.0;
      for (size_t i = payload_offset; i < c.size(); ++i) m += std::abs(c[i]);
      m /= n;
      const double p =
          Sigmoid(k * (m - ReferenceScheme::kProbabilityCentre));
      const double dir = spec.kind == LossKind::kHingeAbove ? 1.0 : -1.0;
      const double margin = dir * (p - spec.tau);
      if (margin > 0.0) {
        out.loss = margin;
        const double dp = p * (1.0 - p) * k / n;
        for (size_t i = payload_offset; i < c.size(); ++i) {
          const double sgn = c[i] > 0.0 ? 1.0 : (c[i] < 0.0 ? -1.0 : 0.0);
          out.dldc[i] = dir * dp * sgn;
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace

double ReferenceScheme::Loss(const Waveform& signal,
                             const LossSpec& loss) const {
  const std::vector<double> c = Correlations(signal);
  return EvaluateLoss(c, c.size() - config_.payload_bits, config_.sharpness,
                      loss)
      .loss;
}

double ReferenceScheme::Analyse(const Waveform& signal, const LossSpec& loss,
                                std::vector<double>* gradient,
                                std::vector<double>* correlations) const {
  ComplexSpectrogram x =
      StftComplex(signal.samples, signal.sample_rate, config_.stft);
  const auto layout = LayoutFor(x.frames, signal.sample_rate);
  std::vector<double> c = RawStatistics(x, *layout);
  for (double& v : c) v /= kCorrelationUnit;
  const LossTerms terms = EvaluateLoss(c, c.size() - config_.payload_bits,
                                       config_.sharpness, loss);
  if (correlations != nullptr) *correlations = c;
  if (gradient == nullptr) return terms.loss;

  constexpr double kFloor2 = kAmplitudeFloor * kAmplitudeFloor;
  // Reuse the spectrogram buffer for the cotangent.
  std::vector<std::complex<double>> values = std::move(x.values);
  x.values.assign(values.size(), {0.0, 0.0});
  for (size_t i = 0; i < layout->carriers.size(); ++i) {
    if (terms.dldc[i] == 0.0) continue;
    const auto& cells = layout->carriers[i];
    const double coef = terms.dldc[i] / (cells.size() * kCorrelationUnit);
    for (const Cell& cell : cells) {
      const std::complex<double> v = values[cell.index];
      x.values[cell.index] = coef * cell.sign * v / (std::norm(v) + kFloor2);
    }
  }
  *gradient = StftAdjoint(x);
  return terms.loss;
}

double ReferenceScheme::LossAndGradient(const Waveform& signal,
                                        const LossSpec& loss,
                                        std::vector<double>* gradient) const {
  return Analyse(signal, loss, gradient, nullptr);
}

DetectionOutcome ReferenceScheme::Evaluate(const Waveform& signal,
                                           const WatermarkBits& truth,
                                           const LossSpec& loss,
                                           double* loss_value,
                                           std::vector<double>* gradient) const {
  std::vector<double> c;
  const double value = Analyse(signal, loss, gradient, &c);
  if (loss_value != nullptr) *loss_value = value;
  return DecodeCorrelations(c, truth);
}

std::vector<double> DefaultThresholdGrid(DetectorFamily family,
                                         size_t payload_bits) {
  std::vector<double> grid;
  if (family == DetectorFamily::kProbability) {
    for (int i = 0; i <= 100; ++i) grid.push_back(i / 100.0);
  } else {
    for (size_t i = 0; i <= payload_bits; ++i) {
      grid.push_back(static_cast<double>(i) / payload_bits);
    }
  }
  return grid;
}

CalibrationResult CalibrateThreshold(
    DetectorFamily family, std::span<const DetectionOutcome> watermarked,
    std::span<const DetectionOutcome> unwatermarked,
    std::span<const double> grid, double max_fnr, double max_fpr) {
  if (watermarked.empty() || unwatermarked.empty() || grid.empty()) {
    Fail(ErrorCode::kInvalidArgument,
         "calibration needs both populations and a threshold grid");
  }
  std::vector<double> taus(grid.begin(), grid.end());
  std::sort(taus.begin(), taus.end());
  CalibrationResult result;
  std::optional<double> chosen;
  for (double tau : taus) {
    DetectionCounts counts;
    counts.watermarked = watermarked.size();
    counts.unwatermarked = unwatermarked.size();
    for (const auto& o : watermarked) counts.missed += !Decide(family, o, tau);
    for (const auto& o : unwatermarked) {
      counts.false_alarms += Decide(family, o, tau);
    }
    CalibrationPoint point{tau, FalseNegativeRate(counts),
                           FalsePositiveRate(counts)};
    result.curve.push_back(point);
    if (!chosen && point.fnr < max_fnr && point.fpr < max_fpr) chosen = tau;
  }
  if (!chosen) {
    throw CalibrationInfeasibleError(
        "no threshold reaches FNR < " + std::to_string(max_fnr) +
            " and FPR < " + std::to_string(max_fpr),
        result.curve);
  }
  result.tau = *chosen;
  return result;
}

CalibrationResult CalibrateThreshold(const WatermarkScheme& scheme,
                                     std::span<const Waveform> watermarked,
                                     std::span<const Waveform> unwatermarked,
                                     const WatermarkBits& payload,
                                     std::span<const double> grid) {
  std::vector<DetectionOutcome> wm, unwm;
  wm.reserve(watermarked.size());
  unwm.reserve(unwatermarked.size());
  for (const auto& s : watermarked) wm.push_back(scheme.Decode(s, payload));
  for (const auto& s : unwatermarked) unwm.push_back(scheme.Decode(s, payload));
  return CalibrateThreshold(scheme.family(), wm, unwm, grid);
}

}  // namespace audiomark
