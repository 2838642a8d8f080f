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

#ifndef AUDIOMARK_SRC_FFT_H_
#define AUDIOMARK_SRC_FFT_H_

#include <complex>

namespace audiomark::internal {

// Real-input FFT of a fixed even size backed by FFTW. Plans are created once
// per size and shared; execution uses per-thread aligned scratch buffers, so
// concurrent calls are safe.
class RealFft {
 public:
  static const RealFft& ForSize(int n);

  int size() const { return n_; }
  // out has n/2 + 1 entries.
  void Forward(const double* in, std::complex<double>* out) const;
  // in has n/2 + 1 entries; the result is not scaled by 1/n.
  void Inverse(const std::complex<double>* in, double* out) const;

 private:
  explicit RealFft(int n);

  int n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace audiomark::internal

#endif  // AUDIOMARK_SRC_FFT_H_
