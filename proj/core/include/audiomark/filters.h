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

#ifndef AUDIOMARK_FILTERS_H_
#define AUDIOMARK_FILTERS_H_

#include <complex>
#include <span>
#include <vector>

#include "audiomark/random.h"

namespace audiomark {

// Normalised so that a0 = 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Digital Butterworth design by the bilinear transform with prewarping.
// `cutoff_ratio` is the -3 dB point as a fraction of Nyquist, in (0, 1).
// Even orders only; order 6 gives three sections.
std::vector<Biquad> ButterworthSections(int order, double cutoff_ratio,
                                        bool highpass);

// Causal filtering through the cascade (transposed direct form II, zero
// initial state).
std::vector<double> FilterCascade(std::span<const double> input,
                                  const std::vector<Biquad>& sections);

// Frequency response of the cascade at `omega` radians per sample.
std::complex<double> CascadeResponse(const std::vector<Biquad>& sections,
                                     double omega);

// Normalised Gaussian kernel with sigma = length / 6.
std::vector<double> GaussianKernel(int length);

// "Same"-size convolution with edge replication.
std::vector<double> ConvolveSameEdge(std::span<const double> input,
                                     std::span<const double> kernel);

// 1/f noise (Kellet's filter bank over white Gaussian noise).
std::vector<double> PinkNoise(size_t n, Rng& rng);

// Lossy stand-in codec: STFT, zero bins above `bandwidth_hz`, then per
// frame and 8-bin subband a log-quantised scale factor and `stages` rounds
// of residual scalar quantisation of the normalised amplitude; phase is
// quantised to 2^stages levels.
std::vector<double> StandInCodec(std::span<const double> input,
                                 int sample_rate, double bandwidth_hz,
                                 int stages);

}  // namespace audiomark

#endif  // AUDIOMARK_FILTERS_H_
