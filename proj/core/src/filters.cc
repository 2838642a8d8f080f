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

#include "audiomark/filters.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "audiomark/audio.h"
#include "audiomark/errors.h"

namespace audiomark {

std::vector<Biquad> ButterworthSections(int order, double cutoff_ratio,
                                        bool highpass) {
  if (order <= 0 || order % 2 != 0) {
    Fail(ErrorCode::kInvalidArgument, "Butterworth order must be even");
  }
  if (!(cutoff_ratio > 0.0 && cutoff_ratio < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "cutoff ratio must lie in (0, 1)");
  }
  const double k = std::tan(std::numbers::pi * cutoff_ratio / 2.0);
  const double k2 = k * k;
  std::vector<Biquad> sections;
  for (int i = 0; i < order / 2; ++i) {
    // Analog section s^2 + a s + 1 for the pole pair at angle theta.
    const double theta = std::numbers::pi * (2 * i + 1) / (2.0 * order);
    const double a = 2.0 * std::sin(theta);
    const double d = k2 + a * k + 1.0;
    Biquad q;
    if (highpass) {
      q.b0 = 1.0 / d;
      q.b1 = -2.0 / d;
      q.b2 = 1.0 / d;
    } else {
      q.b0 = k2 / d;
      q.b1 = 2.0 * k2 / d;
      q.b2 = k2 / d;
    }
    q.a1 = 2.0 * (k2 - 1.0) / d;
    q.a2 = (k2 - a * k + 1.0) / d;
    sections.push_back(q);
  }
  return sections;
}

std::vector<double> FilterCascade(std::span<const double> input,
                                  const std::vector<Biquad>& sections) {
  std::vector<double> x(input.begin(), input.end());
  for (const Biquad& q : sections) {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
  return x;
}

std::complex<double> CascadeResponse(const std::vector<Biquad>& sections,
                                     double omega) {
  const std::complex<double> z1 = std::polar(1.0, -omega);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const Biquad& q : sections) {
    h *= (q.b0 + q.b1 * z1 + q.b2 * z2) / (1.0 + q.a1 * z1 + q.a2 * z2);
  }
  return h;
}

std::vector<double> GaussianKernel(int length) {
  if (length < 1) Fail(ErrorCode::kInvalidArgument, "kernel length must be >= 1");
  const double sigma = length / 6.0;
  const double centre = (length - 1) / 2.0;
  std::vector<double> k(length);
  double sum = 0.0;
  for (int i = 0; i < length; ++i) {
    const double u = (i - centre) / sigma;
    k[i] = std::exp(-0.5 * u * u);
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

std::vector<double> ConvolveSameEdge(std::span<const double> input,
                                     std::span<const double> kernel) {
  const long n = static_cast<long>(input.size());
  const long m = static_cast<long>(kernel.size());
  const long offset = (m - 1) / 2;
  std::vector<double> out(input.size(), 0.0);
  if (n == 0) return out;
  for (long t = 0; t < n; ++t) {
    double acc = 0.0;
    for (long i = 0; i < m; ++i) {
      const long idx = std::clamp(t + offset - i, 0L, n - 1);
      acc += kernel[i] * input[idx];
    }
    out[t] = acc;
  }
  return out;
}

std::vector<double> PinkNoise(size_t n, Rng& rng) {
  std::vector<double> out(n);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (size_t i = 0; i < n; ++i) {
    const double white = rng.Gaussian();
    b0 = 0.99886 * b0 + white * 0.0555179;
    b1 = 0.99332 * b1 + white * 0.0750759;
    b2 = 0.96900 * b2 + white * 0.1538520;
    b3 = 0.86650 * b3 + white * 0.3104856;
    b4 = 0.55000 * b4 + white * 0.5329522;
    b5 = -0.7616 * b5 - white * 0.0168980;
    out[i] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + white * 0.5362;
    b6 = white * 0.115926;
  }
  return out;
}

std::vector<double> StandInCodec(std::span<const double> input,
                                 int sample_rate, double bandwidth_hz,
                                 int stages) {
  if (stages < 1) Fail(ErrorCode::kInvalidArgument, "codec needs >= 1 stage");
  const StftParams params;
  ComplexSpectrogram x = StftComplex(input, sample_rate, params);
  const int keep = std::min(
      x.bins - 1,
      static_cast<int>(std::floor(bandwidth_hz * params.window_size / sample_rate)));
  constexpr int kSubband = 8;
  const double phase_step = 2.0 * std::numbers::pi / std::ldexp(1.0, stages);
  for (int f = 0; f < x.frames; ++f) {
    std::complex<double>* row = &x.values[x.Index(f, 0)];
    for (int b = keep + 1; b < x.bins; ++b) row[b] = 0.0;
    for (int b0 = 0; b0 <= keep; b0 += kSubband) {
      const int b1 = std::min(keep + 1, b0 + kSubband);
      double peak = 0.0;
      for (int b = b0; b < b1; ++b) peak = std::max(peak, std::abs(row[b]));
      if (peak <= 0.0) continue;
      // Scale factor on a quarter-octave grid.
      const double scale = std::exp2(std::round(4.0 * std::log2(peak)) / 4.0);
      for (int b = b0; b < b1; ++b) {
        double residual = std::abs(row[b]) / scale;
        double amplitude = 0.0;
        for (int s = 1; s <= stages; ++s) {
          const double step = std::ldexp(1.0, -s);
          const double q = step * std::round(residual / step);
          amplitude += q;
          residual -= q;
        }
        const double phase =
            phase_step * std::round(std::arg(row[b]) / phase_step);
        row[b] = std::polar(amplitude * scale, phase);
      }
    }
  }
  return IstftComplex(x);
}

}  // namespace audiomark
