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

#include "audiomark/audio.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <tuple>

#include "audiomark/errors.h"
#include "fft.h"

namespace audiomark {

using internal::RealFft;

void StftParams::Validate() const {
  if (window_size < 4 || window_size % 4 != 0 || hop_size <= 0) {
    Fail(ErrorCode::kInvalidArgument,
         "window size must be a positive multiple of 4 and hop positive");
  }
  if (hop_size != window_size / 2 && hop_size != window_size / 4) {
    Fail(ErrorCode::kInvalidOverlap,
         "Hann window requires hop = window/2 or window/4, got window " +
             std::to_string(window_size) + " hop " + std::to_string(hop_size));
  }
}

std::vector<double> MakeWindow(const StftParams& params) {
  std::vector<double> w(params.window_size);
  const double n = params.window_size;
  for (int i = 0; i < params.window_size; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

namespace {

const std::vector<double>& CachedWindow(const StftParams& params) {
  thread_local std::map<int, std::vector<double>> cache;
  auto it = cache.find(params.window_size);
  if (it == cache.end()) {
    it = cache.emplace(params.window_size, MakeWindow(params)).first;
  }
  return it->second;
}

// 1 / sum of squared windows at every output sample (0 where uncovered).
const std::vector<double>& CachedInverseNorm(const FrameLayout& layout,
                                             const std::vector<double>& w) {
  thread_local std::map<std::tuple<int, int, size_t>, std::vector<double>>
      cache;
  const auto key = std::make_tuple(layout.window, layout.hop, layout.length);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (cache.size() > 64) cache.clear();
  std::vector<double> norm(layout.length, 0.0);
  const long n = static_cast<long>(layout.length);
  for (int f = 0; f < layout.frames; ++f) {
    const long start = layout.FrameStart(f);
    const int i0 = static_cast<int>(std::max(0L, -start));
    const int i1 = static_cast<int>(std::min<long>(layout.window, n - start));
    for (int i = i0; i < i1; ++i) norm[start + i] += w[i] * w[i];
  }
  for (double& v : norm) v = v > 1e-12 ? 1.0 / v : 0.0;
  return cache.emplace(key, std::move(norm)).first->second;
}

}  // namespace

FrameLayout FrameLayout::For(size_t length, const StftParams& params) {
  params.Validate();
  if (length < static_cast<size_t>(params.window_size)) {
    Fail(ErrorCode::kSignalTooShort,
         "signal of " + std::to_string(length) +
             " samples is shorter than the analysis window");
  }
  FrameLayout layout;
  layout.length = length;
  layout.window = params.window_size;
  layout.hop = params.hop_size;
  layout.pad = params.window_size - params.hop_size;
  layout.frames =
      static_cast<int>((length - 1 + layout.pad) / layout.hop) + 1;
  return layout;
}

ComplexSpectrogram StftComplex(std::span<const double> samples,
                               int sample_rate, const StftParams& params) {
  const FrameLayout layout = FrameLayout::For(samples.size(), params);
  const std::vector<double>& window = CachedWindow(params);
  const RealFft& fft = RealFft::ForSize(params.window_size);

  ComplexSpectrogram out;
  out.params = params;
  out.sample_rate = sample_rate;
  out.original_length = samples.size();
  out.frames = layout.frames;
  out.bins = params.bins();
  out.values.resize(static_cast<size_t>(out.frames) * out.bins);

  const long n = static_cast<long>(samples.size());
  std::vector<double> frame(params.window_size);
  for (int f = 0; f < layout.frames; ++f) {
    const long start = layout.FrameStart(f);
    if (start >= 0 && start + layout.window <= n) {
      const double* src = samples.data() + start;
      for (int i = 0; i < layout.window; ++i) frame[i] = src[i] * window[i];
    } else {
      for (int i = 0; i < layout.window; ++i) {
        const long t = start + i;
        frame[i] = (t >= 0 && t < n) ? samples[t] * window[i] : 0.0;
      }
    }
    fft.Forward(frame.data(), &out.values[out.Index(f, 0)]);
  }
  return out;
}

std::vector<double> IstftComplex(const ComplexSpectrogram& spectrogram) {
  const FrameLayout layout =
      FrameLayout::For(spectrogram.original_length, spectrogram.params);
  if (layout.frames != spectrogram.frames ||
      spectrogram.bins != spectrogram.params.bins() ||
      spectrogram.values.size() !=
          static_cast<size_t>(spectrogram.frames) * spectrogram.bins) {
    Fail(ErrorCode::kShapeError,
         "spectrogram shape does not match its original length");
  }
  const std::vector<double>& window = CachedWindow(spectrogram.params);
  const std::vector<double>& inverse_norm = CachedInverseNorm(layout, window);
  const RealFft& fft = RealFft::ForSize(layout.window);
  const long n = static_cast<long>(layout.length);
  const double scale = 1.0 / layout.window;

  std::vector<double> out(layout.length, 0.0);
  std::vector<double> frame(layout.window);
  for (int f = 0; f < layout.frames; ++f) {
    fft.Inverse(&spectrogram.values[spectrogram.Index(f, 0)], frame.data());
    const long start = layout.FrameStart(f);
    const int i0 = static_cast<int>(std::max(0L, -start));
    const int i1 = static_cast<int>(std::min<long>(layout.window, n - start));
    for (int i = i0; i < i1; ++i) out[start + i] += frame[i] * window[i];
  }
  for (size_t t = 0; t < out.size(); ++t) out[t] *= scale * inverse_norm[t];
  return out;
}

Spectrogram ToPolar(const ComplexSpectrogram& spectrogram) {
  Spectrogram out;
  out.params = spectrogram.params;
  out.sample_rate = spectrogram.sample_rate;
  out.original_length = spectrogram.original_length;
  out.frames = spectrogram.frames;
  out.bins = spectrogram.bins;
  out.amplitude.resize(spectrogram.values.size());
  out.phase.resize(spectrogram.values.size());
  for (size_t i = 0; i < spectrogram.values.size(); ++i) {
    out.amplitude[i] = std::abs(spectrogram.values[i]);
    double p = std::arg(spectrogram.values[i]);
    if (p <= -std::numbers::pi) p = std::numbers::pi;
    out.phase[i] = p;
  }
  return out;
}

ComplexSpectrogram ToComplex(const Spectrogram& spectrogram) {
  if (spectrogram.amplitude.size() != spectrogram.phase.size() ||
      spectrogram.amplitude.size() !=
          static_cast<size_t>(spectrogram.frames) * spectrogram.bins) {
    Fail(ErrorCode::kShapeError, "amplitude and phase shapes differ");
  }
  ComplexSpectrogram out;
  out.params = spectrogram.params;
  out.sample_rate = spectrogram.sample_rate;
  out.original_length = spectrogram.original_length;
  out.frames = spectrogram.frames;
  out.bins = spectrogram.bins;
  out.values.resize(spectrogram.amplitude.size());
  for (size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = std::polar(spectrogram.amplitude[i], spectrogram.phase[i]);
  }
  return out;
}

Spectrogram Stft(const Waveform& signal, const StftParams& params) {
  return ToPolar(StftComplex(signal.samples, signal.sample_rate, params));
}

Waveform Istft(const Spectrogram& spectrogram) {
  spectrogram.params.Validate();
  return Waveform{IstftComplex(ToComplex(spectrogram)),
                  spectrogram.sample_rate};
}

std::vector<double> StftAdjoint(const ComplexSpectrogram& cotangent) {
  const FrameLayout layout =
      FrameLayout::For(cotangent.original_length, cotangent.params);
  const std::vector<double>& window = CachedWindow(cotangent.params);
  const RealFft& fft = RealFft::ForSize(layout.window);
  const int bins = cotangent.bins;
  const long n = static_cast<long>(layout.length);

  std::vector<double> grad(layout.length, 0.0);
  std::vector<std::complex<double>> spectrum(bins);
  std::vector<double> frame(layout.window);
  for (int f = 0; f < layout.frames; ++f) {
    const std::complex<double>* g = &cotangent.values[cotangent.Index(f, 0)];
    // Re sum_b G_b e^{+i 2 pi b n / N}: the inverse real transform counts
    // interior bins twice, so interior bins are halved.
    for (int b = 0; b < bins; ++b) spectrum[b] = 0.5 * g[b];
    spectrum[0] = g[0];
    spectrum[bins - 1] = g[bins - 1];
    fft.Inverse(spectrum.data(), frame.data());
    const long start = layout.FrameStart(f);
    const int i0 = static_cast<int>(std::max(0L, -start));
    const int i1 = static_cast<int>(std::min<long>(layout.window, n - start));
    for (int i = i0; i < i1; ++i) grad[start + i] += frame[i] * window[i];
  }
  return grad;
}

namespace {

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::vector<double> ResampleRatio(std::span<const double> samples,
                                  double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    Fail(ErrorCode::kInvalidArgument, "resampling ratio must be positive");
  }
  const size_t out_length =
      static_cast<size_t>(std::llround(samples.size() * ratio));
  std::vector<double> out(out_length, 0.0);
  if (ratio == 1.0) {
    std::copy(samples.begin(), samples.begin() + out_length, out.begin());
    return out;
  }
  constexpr double kHalfTaps = 16.0;
  const double cutoff = std::min(1.0, ratio);
  const double radius = kHalfTaps / cutoff;
  const long n = static_cast<long>(samples.size());
  for (size_t j = 0; j < out_length; ++j) {
    const double t = j / ratio;
    const long k0 = std::max(0L, static_cast<long>(std::ceil(t - radius)));
    const long k1 = std::min(n - 1, static_cast<long>(std::floor(t + radius)));
    double acc = 0.0;
    for (long k = k0; k <= k1; ++k) {
      const double u = t - k;
      const double taper = 0.5 + 0.5 * std::cos(std::numbers::pi * u / radius);
      acc += samples[k] * cutoff * Sinc(cutoff * u) * taper;
    }
    out[j] = acc;
  }
  return out;
}

Waveform Resample(const Waveform& signal, int target_rate) {
  if (signal.sample_rate <= 0 || target_rate <= 0) {
    Fail(ErrorCode::kInvalidArgument, "sample rates must be positive");
  }
  if (signal.sample_rate == target_rate) return signal;
  const double ratio = static_cast<double>(target_rate) / signal.sample_rate;
  return Waveform{ResampleRatio(signal.samples, ratio), target_rate};
}

double Energy(std::span<const double> samples) {
  double e = 0.0;
  for (double v : samples) e += v * v;
  return e;
}

double MeanPower(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  return Energy(samples) / samples.size();
}

double PeakAbs(std::span<const double> samples) {
  double p = 0.0;
  for (double v : samples) p = std::max(p, std::abs(v));
  return p;
}

}  // namespace audiomark
