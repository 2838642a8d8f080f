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

#ifndef AUDIOMARK_HARNESS_H_
#define AUDIOMARK_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "audiomark/blackbox.h"
#include "audiomark/corpus.h"
#include "audiomark/perturbations.h"
#include "audiomark/watermark.h"
#include "audiomark/whitebox.h"

namespace audiomark {

inline constexpr std::string_view kToolVersion = "0.3.0";

struct RunConfig {
  std::vector<SchemeConfig> schemes;
  // No-box conditions; each spec's seed is replaced by a derived one.
  std::vector<PerturbationSpec> conditions;
  // Re-derive each scheme's threshold on the clean corpus before the run.
  bool calibrate = false;
  // 0 = every clip. Attack runs default to 200 via AttackRunConfig.
  size_t sample_cap = 0;
  Seed seed{7};
  size_t jobs = 0;  // 0 = DefaultThreadCount()
  // Used for external codec kinds; null = CodecRegistry::FromEnvironment().
  const CodecRegistry* codecs = nullptr;
  // Conditions whose codec is not configured are dropped (and listed in the
  // report metadata) instead of failing every sample.
  bool skip_unavailable_codecs = true;

  // Throws InvalidArgument.
  void Validate() const;
};

enum class AttackMethod { kHsja, kSquare, kWhitebox, kIfgsm };

std::string_view AttackMethodName(AttackMethod method);
AttackMethod ParseAttackMethod(std::string_view name);

struct AttackRunConfig {
  AttackMethod method = AttackMethod::kWhitebox;
  // SNR budgets R (whitebox, ifgsm), l-inf bounds (square) or iteration
  // counts (hsja); one report condition each.
  std::vector<double> budgets;
  bool removal = true;
  bool forgery = true;
  OracleBudget oracle;
  HsjaDomain domain = HsjaDomain::kSpectrogram;
  HsjaOptions hsja;
  SquareOptions square;
  WhiteboxConfig whitebox;
  // Attacked clips per run, drawn by stratified sampling.
  size_t sample_cap = 200;
  // Keep per-iteration traces in the report.
  bool keep_traces = true;

  void Validate() const;
};

// Outcome of one clip under one (scheme, condition).
struct SampleOutcome {
  std::string scheme;
  std::string condition;
  double param = 0.0;
  size_t clip = 0;
  Sex sex = Sex::kUnknown;
  AgeGroup age = AgeGroup::kUnknown;
  std::string language;
  bool failed = false;
  std::string error;
  // Detector still fires on the perturbed watermarked clip (or, for attacks,
  // the removal attack failed). Unset when removal was not run.
  std::optional<bool> detected_watermarked;
  // Detector fires on the perturbed clean clip (forgery succeeded).
  std::optional<bool> detected_clean;
  double snr_db = 0.0;   // NaN when undefined
  double quality = 0.0;  // NaN when undefined
  long queries = 0;
};

struct AttackTrace {
  std::string scheme;
  std::string condition;
  double param = 0.0;
  size_t clip = 0;
  AttackGoal goal = AttackGoal::kRemoval;
  std::vector<TracePoint> points;
};

struct ReportRow {
  std::string scheme;
  std::string condition;
  double param = 0.0;
  std::string group;  // "overall", "sex=female", "age=teens", "language=L01"
  size_t n = 0;
  double fnr = 0.0;  // NaN when removal was not evaluated
  double fpr = 0.0;  // NaN when forgery was not evaluated
  double mean_snr_db = 0.0;
  double mean_quality = 0.0;
  uint64_t seed = 0;

  bool operator==(const ReportRow&) const = default;
};

struct RunMetadata {
  std::string tool_version{kToolVersion};
  std::string kind;  // "nobox" or the attack method
  StftParams stft;
  std::map<std::string, double> thresholds;
  std::string rescale_mode;
  uint64_t seed = 0;
  size_t clips = 0;
  std::vector<std::string> skipped_conditions;
  // Everything else needed to re-create the run.
  std::map<std::string, std::string> settings;
};

struct EvalReport {
  RunMetadata metadata;
  std::vector<ReportRow> rows;
  std::vector<SampleOutcome> samples;
  std::vector<AttackTrace> traces;
  size_t failed_samples = 0;
  // More than 10% of samples failed.
  bool degraded = false;
};

// Seeded stratified subsample: clips are shuffled within (sex, age) cells
// and drawn round-robin across cells. Returns sorted indices.
std::vector<size_t> StratifiedSample(const std::vector<CorpusEntry>& entries,
                                     size_t cap, Seed seed);

// Payload embedded into clip `index` and the one a forger targets.
WatermarkBits ClipPayload(Seed seed, size_t index, size_t bits);
WatermarkBits ForgeryPayload(Seed seed, size_t index, size_t bits);

// Thresholds per scheme name: the configured ones, or calibrated ones when
// run.calibrate is set (throws CalibrationInfeasibleError).
// Every kind at its default parameter grid, in declaration order.
std::vector<PerturbationSpec> Table3Conditions(
    const std::filesystem::path& noise_corpus = {});

// Embeds ClipPayload into every clip and calibrates `config` on the marked
// and clean detections. Throws CalibrationInfeasibleError.
CalibrationResult CalibrateOnCorpus(const SchemeConfig& config,
                                    const std::vector<Clip>& clips, Seed seed,
                                    size_t jobs = 0);

std::map<std::string, double> ResolveThresholds(const RunConfig& run,
                                                const std::vector<Clip>& clips);

EvalReport RunNobox(const RunConfig& run, const std::vector<Clip>& clips);
EvalReport RunAttack(const RunConfig& run, const AttackRunConfig& attack,
                     const std::vector<Clip>& clips);

// Builds overall and per-attribute rows from per-sample outcomes. Rows are
// ordered by scheme, condition, param, then group.
std::vector<ReportRow> AggregateRows(const std::vector<SampleOutcome>& samples,
                                     uint64_t seed);

enum class GroupAttribute { kSex, kAge, kLanguage };
enum class GroupMetric { kFnr, kFpr };

std::string_view GroupAttributeName(GroupAttribute attribute);
GroupAttribute ParseGroupAttribute(std::string_view name);

struct GroupComparison {
  std::string scheme;
  std::string condition;
  // Empty when pooled across parameters.
  std::optional<double> param;
  std::string group_a;
  std::string group_b;
  size_t n_a = 0;
  size_t n_b = 0;
  double rate_a = 0.0;
  double rate_b = 0.0;
  WelchResult test;
  bool significant = false;
  bool small_sample = false;
  // Set when the test is undefined (e.g. DegenerateVariance).
  std::string error;
};

inline constexpr size_t kSmallGroupSize = 30;

// Pairwise Welch tests on per-clip detection indicators, per parameter and
// pooled over each condition's parameters.
std::vector<GroupComparison> GroupAnalysis(
    const std::vector<SampleOutcome>& samples, GroupAttribute attribute,
    GroupMetric metric, double alpha = 0.05);

}  // namespace audiomark

#endif  // AUDIOMARK_HARNESS_H_
