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

#ifndef AUDIOMARK_BLACKBOX_H_
#define AUDIOMARK_BLACKBOX_H_

#include <functional>
#include <limits>
#include <span>
#include <string_view>

#include "audiomark/attack.h"
#include "audiomark/random.h"
#include "audiomark/watermark.h"

namespace audiomark {

struct OracleBudget {
  long max_iterations = 10000;
  long max_queries = std::numeric_limits<long>::max();
  int grad_est_init = 100;
  int grad_est_cap = 1000;

  void Validate() const;
};

// Returns true when the detector flags the waveform as watermarked.
using DecisionFunction = std::function<bool(const Waveform&)>;
// Real-valued detector score (bitwise accuracy or probability).
using ScoreFunction = std::function<double(const Waveform&)>;

DecisionFunction SchemeDecisionOracle(const WatermarkScheme& scheme,
                                      const WatermarkBits& truth, double tau);
ScoreFunction SchemeScoreOracle(const WatermarkScheme& scheme,
                                const WatermarkBits& truth);

// Counts every call and refuses calls past the budget.
template <typename Fn>
class CountingOracle {
 public:
  CountingOracle(Fn fn, long max_queries)
      : fn_(std::move(fn)), max_queries_(max_queries) {}

  bool exhausted() const { return used_ >= max_queries_; }
  long used() const { return used_; }
  auto operator()(const Waveform& w) {
    ++used_;
    return fn_(w);
  }

 private:
  Fn fn_;
  long max_queries_;
  long used_ = 0;
};

enum class HsjaDomain { kWaveform, kSpectrogram };

std::string_view HsjaDomainName(HsjaDomain domain);
HsjaDomain ParseHsjaDomain(std::string_view name);

struct HsjaOptions {
  int bisection_steps = 25;
  // Greedy initialiser: Gaussian noise at these SNRs, highest first.
  double ladder_start_db = 40.0;
  double ladder_step_db = 5.0;
  double ladder_stop_db = 0.0;
  // Geometric step search gives up after this many halvings.
  int max_step_halvings = 30;
};

// Decision-based boundary walk. Trace values are the best SNR (dB) held
// after each iteration; the entry at iteration 0 is the initialiser's SNR.
AttackResult Hsja(const DecisionFunction& oracle, const Waveform& signal,
                  AttackGoal goal, HsjaDomain domain,
                  const OracleBudget& budget, Seed seed,
                  const HsjaOptions& options = {});

struct SquareOptions {
  // Fraction of amplitude cells covered by a patch at the start of the
  // schedule (the attack's published default).
  double p_init = 0.05;
  StftParams stft;
  // Called with the iteration and the amplitude perturbation (frame-major,
  // like Spectrogram) after initialisation and after every accepted patch.
  std::function<void(long, std::span<const double>)> on_accept;
};

// Score-based random search over STFT amplitudes with phase held fixed.
// Trace values are the best score after each iteration.
AttackResult SquareAttack(const ScoreFunction& score_oracle,
                          const Waveform& signal, AttackGoal goal,
                          double linf_bound, const OracleBudget& budget,
                          Seed seed, const DecisionFunction& decision,
                          const SquareOptions& options = {});

// Patch fraction at iteration `it` of a run scaled to 10000 iterations.
double SquarePatchFraction(double p_init, long it, long total_iterations);

}  // namespace audiomark

#endif  // AUDIOMARK_BLACKBOX_H_
