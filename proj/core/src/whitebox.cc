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

#include "audiomark/whitebox.h"

#include <cmath>
#include <limits>

#include "audiomark/errors.h"

namespace audiomark {

std::string_view AttackGoalName(AttackGoal goal) {
  return goal == AttackGoal::kRemoval ? "removal" : "forgery";
}

std::string_view WhiteboxVariantName(WhiteboxVariant variant) {
  return variant == WhiteboxVariant::kIfgsm ? "ifgsm" : "whitebox";
}

std::string_view RescaleModeName(RescaleMode mode) {
  return mode == RescaleMode::kPowerRatio ? "power_ratio" : "amplitude_exact";
}

RescaleMode ParseRescaleMode(std::string_view name) {
  if (name == "power_ratio") return RescaleMode::kPowerRatio;
  if (name == "amplitude_exact") return RescaleMode::kAmplitudeExact;
  Fail(ErrorCode::kInvalidArgument,
       "rescale mode must be power_ratio or amplitude_exact");
}

void WhiteboxConfig::Validate() const {
  if (!std::isfinite(snr_budget_db)) {
    Fail(ErrorCode::kInvalidArgument, "SNR budget must be finite");
  }
  if (iterations < 1) Fail(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  if (!(learning_rate > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
}

double ScalingFactor(std::span<const double> signal,
                     std::span<const double> delta, double snr_budget_db,
                     RescaleMode mode) {
  if (signal.size() != delta.size()) {
    Fail(ErrorCode::kShapeError, "perturbation and signal lengths differ");
  }
  const double ps = MeanPower(signal);
  const double pd = MeanPower(delta);
  if (ps == 0.0) Fail(ErrorCode::kUndefinedSnr, "signal is all zeros");
  if (pd == 0.0) return 1.0;
  const double snr = 10.0 * std::log10(ps / pd);
  if (snr >= snr_budget_db) return 1.0;
  const double divisor = mode == RescaleMode::kPowerRatio ? 10.0 : 20.0;
  return std::pow(10.0, (snr_budget_db - snr) / divisor);
}

LossSpec WhiteboxLoss(const WatermarkScheme& scheme, AttackGoal goal,
                      const WatermarkBits& bits, double tau) {
  LossSpec loss;
  loss.tau = tau;
  if (scheme.family() == DetectorFamily::kProbability) {
    loss.kind = goal == AttackGoal::kRemoval ? LossKind::kHingeAbove
                                             : LossKind::kHingeBelow;
    return loss;
  }
  loss.kind = LossKind::kCrossEntropy;
  const WatermarkBits target = scheme.CarrierTarget(bits);
  loss.target = goal == AttackGoal::kRemoval ? target.Complement() : target;
  return loss;
}

namespace {

std::vector<double> Add(const std::vector<double>& a,
                        const std::vector<double>& b) {
  std::vector<double> out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

}  // namespace

AttackResult WhiteboxAttack(const Waveform& signal, const WatermarkBits& bits,
                            AttackGoal goal, const WatermarkScheme& scheme,
                            double tau, const WhiteboxConfig& config) {
  config.Validate();
  if (!scheme.SupportsGradient()) {
    Fail(ErrorCode::kGradientUnavailable,
         "scheme '" + scheme.name() + "' exposes no gradient");
  }
  const DetectorFamily family = scheme.family();
  const bool want = GoalDecision(goal);
  const LossSpec loss = WhiteboxLoss(scheme, goal, bits, tau);
  auto better = [goal](double q, double best) {
    return goal == AttackGoal::kRemoval ? q < best : q > best;
  };

  AttackResult result;
  std::vector<double> delta(signal.size(), 0.0);
  std::vector<double> best_delta = delta;
  std::vector<double> gradient;
  Waveform current = signal;

  DetectionOutcome outcome =
      scheme.Evaluate(current, bits, loss, nullptr, &gradient);
  ++result.queries_used;
  double best_q = outcome.score;
  bool success = Decide(family, outcome, tau) == want;
  result.trace.push_back({0, best_q});

  for (int it = 1; it <= config.iterations && !success; ++it) {
    if (config.variant == WhiteboxVariant::kIfgsm) {
      for (size_t i = 0; i < delta.size(); ++i) {
        const double g = gradient[i];
        delta[i] -= config.learning_rate * ((g > 0.0) - (g < 0.0));
      }
    } else {
      for (size_t i = 0; i < delta.size(); ++i) {
        delta[i] -= config.learning_rate * gradient[i];
      }
    }
    const double r =
        ScalingFactor(signal.samples, delta, config.snr_budget_db, config.rescale);
    if (r > 1.0) {
      for (double& d : delta) d /= r;
    }
    current.samples = Add(signal.samples, delta);
    outcome = scheme.Evaluate(current, bits, loss, nullptr, &gradient);
    ++result.queries_used;
    result.iterations = it;
    if (Decide(family, outcome, tau) == want) {
      success = true;
      best_delta = delta;
      if (better(outcome.score, best_q)) best_q = outcome.score;
    } else if (better(outcome.score, best_q)) {
      best_q = outcome.score;
      best_delta = delta;
    }
    result.trace.push_back({it, best_q});
  }

  // The loop only rescales after a step; make sure the returned point obeys
  // the budget before reporting it.
  const double r = ScalingFactor(signal.samples, best_delta,
                                 config.snr_budget_db, config.rescale);
  result.perturbed = Waveform{Add(signal.samples, best_delta), signal.sample_rate};
  if (r > 1.0) {
    for (double& d : best_delta) d /= r;
    result.perturbed.samples = Add(signal.samples, best_delta);
    const DetectionOutcome check = scheme.Decode(result.perturbed, bits);
    ++result.queries_used;
    success = Decide(family, check, tau) == want;
  }
  result.success = success;
  result.final_snr = Snr(signal, result.perturbed);
  result.final_quality = ScoreQuality(signal, result.perturbed);
  return result;
}

AttackResult WhiteboxRemove(const Waveform& watermarked,
                            const WatermarkBits& bits,
                            const WatermarkScheme& scheme, double tau,
                            const WhiteboxConfig& config) {
  return WhiteboxAttack(watermarked, bits, AttackGoal::kRemoval, scheme, tau,
                        config);
}

AttackResult WhiteboxForge(const Waveform& clean, const WatermarkBits& forged,
                           const WatermarkScheme& scheme, double tau,
                           const WhiteboxConfig& config) {
  return WhiteboxAttack(clean, forged, AttackGoal::kForgery, scheme, tau,
                        config);
}

}  // namespace audiomark
