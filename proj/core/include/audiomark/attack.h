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

#ifndef AUDIOMARK_ATTACK_H_
#define AUDIOMARK_ATTACK_H_

#include <string_view>
#include <vector>

#include "audiomark/audio.h"
#include "audiomark/metrics.h"

namespace audiomark {

// Removal wants the detector to say "not watermarked", forgery the opposite.
enum class AttackGoal { kRemoval, kForgery };

std::string_view AttackGoalName(AttackGoal goal);
inline bool GoalDecision(AttackGoal goal) { return goal == AttackGoal::kForgery; }

struct TracePoint {
  long iteration = 0;
  double value = 0.0;  // best SNR (HSJA) or best score / monitored quantity
};

struct AttackResult {
  Waveform perturbed;
  bool success = false;
  long queries_used = 0;
  long iterations = 0;
  double final_snr = 0.0;
  QualityScore final_quality;
  std::vector<TracePoint> trace;
};

}  // namespace audiomark

#endif  // AUDIOMARK_ATTACK_H_
