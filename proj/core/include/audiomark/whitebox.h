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

#ifndef AUDIOMARK_WHITEBOX_H_
#define AUDIOMARK_WHITEBOX_H_

#include <span>
#include <string_view>

#include "audiomark/attack.h"
#include "audiomark/watermark.h"

namespace audiomark {

enum class WhiteboxVariant { kGradientDescent, kIfgsm };

// kPowerRatio divides the perturbation by the power ratio
// 10^((R - snr) / 10), which overshoots to SNR = 2R - snr. kAmplitudeExact
// divides by the amplitude ratio 10^((R - snr) / 20) and lands on R.
enum class RescaleMode { kPowerRatio, kAmplitudeExact };

std::string_view WhiteboxVariantName(WhiteboxVariant variant);
std::string_view RescaleModeName(RescaleMode mode);
RescaleMode ParseRescaleMode(std::string_view name);

struct WhiteboxConfig {
  double snr_budget_db = 20.0;
  int iterations = 1000;
  double learning_rate = 1e-5;
  WhiteboxVariant variant = WhiteboxVariant::kGradientDescent;
  RescaleMode rescale = RescaleMode::kAmplitudeExact;

  void Validate() const;
};

// Divisor r >= 1 that brings snr(s, s + delta / r) up to the budget R; 1 when
// the budget is already met. Throws UndefinedSnr for an all-zero signal.
double ScalingFactor(std::span<const double> signal,
                     std::span<const double> delta, double snr_budget_db,
                     RescaleMode mode);

// Attack loss: cross-entropy against the carrier target for bitwise
// families, hinge on the detector probability otherwise. For removal the
// target is the complement of the embedded bits; for forgery it is the
// forged payload (with the sync pattern prepended where the family has one).
LossSpec WhiteboxLoss(const WatermarkScheme& scheme, AttackGoal goal,
                      const WatermarkBits& bits, double tau);

// Gradient attack on a watermarked clip toward "not detected".
AttackResult WhiteboxRemove(const Waveform& watermarked,
                            const WatermarkBits& bits,
                            const WatermarkScheme& scheme, double tau,
                            const WhiteboxConfig& config);

// Gradient attack on a clean clip toward "detected with `forged`".
AttackResult WhiteboxForge(const Waveform& clean, const WatermarkBits& forged,
                           const WatermarkScheme& scheme, double tau,
                           const WhiteboxConfig& config);

AttackResult WhiteboxAttack(const Waveform& signal, const WatermarkBits& bits,
                            AttackGoal goal, const WatermarkScheme& scheme,
                            double tau, const WhiteboxConfig& config);

}  // namespace audiomark

#endif  // AUDIOMARK_WHITEBOX_H_
