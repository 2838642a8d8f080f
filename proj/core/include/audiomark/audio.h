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

#ifndef AUDIOMARK_AUDIO_H_
#define AUDIOMARK_AUDIO_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace audiomark {

inline constexpr int kDefaultSampleRate = 16000;

struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  size_t size() const { return samples.size(); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class WindowKind { kHann };

// Analysis/synthesis parameters. Only constant-overlap-add configurations are
// accepted: a periodic Hann window with hop = window/2 or window/4.
struct StftParams {
  int window_size = 512;
  int hop_size = 128;
  WindowKind window = WindowKind::kHann;

  int bins() const { return window_size / 2 + 1; }
  // Throws InvalidOverlap for non-COLA settings, InvalidArgument for
  // nonsensical sizes.
  void Validate() const;
  bool operator==(const StftParams&) const = default;
};

std::vector<double> MakeWindow(const StftParams& params);

// Frame geometry shared by analysis and synthesis. The signal is padded by
// window - hop zeros on the left, so every sample is covered by the same
// number of frames and the overlap-add normalisation is well conditioned.
struct FrameLayout {
  size_t length = 0;
  int window = 0;
  int hop = 0;
  int pad = 0;
  int frames = 0;

  static FrameLayout For(size_t length, const StftParams& params);
  long FrameStart(int frame) const {
    return static_cast<long>(frame) * hop - pad;
  }
};

// Amplitude and phase matrices, row-major [frames x bins].
struct Spectrogram {
  StftParams params;
  int sample_rate = kDefaultSampleRate;
  size_t original_length = 0;
  int frames = 0;
  int bins = 0;
  std::vector<double> amplitude;
  std::vector<double> phase;

  size_t Index(int frame, int bin) const {
    return static_cast<size_t>(frame) * bins + bin;
  }
};

struct ComplexSpectrogram {
  StftParams params;
  int sample_rate = kDefaultSampleRate;
  size_t original_length = 0;
  int frames = 0;
  int bins = 0;
  std::vector<std::complex<double>> values;

  size_t Index(int frame, int bin) const {
    return static_cast<size_t>(frame) * bins + bin;
  }
};

// Throws SignalTooShort when the waveform is shorter than one window.
Spectrogram Stft(const Waveform& signal, const StftParams& params = {});
Waveform Istft(const Spectrogram& spectrogram);

ComplexSpectrogram StftComplex(std::span<const double> samples,
                               int sample_rate,
                               const StftParams& params = {});
std::vector<double> IstftComplex(const ComplexSpectrogram& spectrogram);

Spectrogram ToPolar(const ComplexSpectrogram& spectrogram);
ComplexSpectrogram ToComplex(const Spectrogram& spectrogram);

// Adjoint of StftComplex. `cotangent` holds dL/dRe(X) + i dL/dIm(X) per
// cell; the result is dL/dx for every input sample.
std::vector<double> StftAdjoint(const ComplexSpectrogram& cotangent);

// Windowed-sinc resampling (32 taps at the lower of the two rates). Output
// length is round(length * ratio).
std::vector<double> ResampleRatio(std::span<const double> samples,
                                  double ratio);
Waveform Resample(const Waveform& signal, int target_rate);

double Energy(std::span<const double> samples);
double MeanPower(std::span<const double> samples);
double PeakAbs(std::span<const double> samples);

}  // namespace audiomark

#endif  // AUDIOMARK_AUDIO_H_
