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

#include "fft.h"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <mutex>

namespace audiomark::internal {
namespace {

struct Scratch {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  int capacity = 0;

  ~Scratch() {
    fftw_free(real);
    fftw_free(spectrum);
  }

  void Reserve(int n) {
    if (n <= capacity) return;
    fftw_free(real);
    fftw_free(spectrum);
    real = fftw_alloc_real(n);
    spectrum = fftw_alloc_complex(n / 2 + 1);
    capacity = n;
  }
};

Scratch& ThreadScratch(int n) {
  thread_local Scratch scratch;
  scratch.Reserve(n);
  return scratch;
}

// FFTW's planner is not thread safe.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  double* real = fftw_alloc_real(n);
  fftw_complex* spectrum = fftw_alloc_complex(n / 2 + 1);
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real, spectrum, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, spectrum, real, FFTW_ESTIMATE);
  fftw_free(real);
  fftw_free(spectrum);
}

const RealFft& RealFft::ForSize(int n) {
  static std::map<int, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(PlannerMutex());
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, std::unique_ptr<RealFft>(new RealFft(n))).first;
  }
  return *it->second;
}

void RealFft::Forward(const double* in, std::complex<double>* out) const {
  Scratch& s = ThreadScratch(n_);
  std::memcpy(s.real, in, sizeof(double) * n_);
  auto* direct = reinterpret_cast<fftw_complex*>(out);
  if (fftw_alignment_of(reinterpret_cast<double*>(direct)) ==
      fftw_alignment_of(reinterpret_cast<double*>(s.spectrum))) {
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), s.real,
                         direct);
    return;
  }
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), s.real,
                       s.spectrum);
  std::memcpy(static_cast<void*>(out), s.spectrum,
              sizeof(fftw_complex) * (n_ / 2 + 1));
}

void RealFft::Inverse(const std::complex<double>* in, double* out) const {
  Scratch& s = ThreadScratch(n_);
  std::memcpy(s.spectrum, static_cast<const void*>(in),
              sizeof(fftw_complex) * (n_ / 2 + 1));
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), s.spectrum,
                       s.real);
  std::memcpy(out, s.real, sizeof(double) * n_);
}

}  // namespace audiomark::internal
