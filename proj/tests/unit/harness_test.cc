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

#include "audiomark/harness.h"

#include <cmath>
#include <map>
#include <set>

#include "audiomark/corpus.h"
#include "audiomark/errors.h"
#include "gtest/gtest.h"

namespace audiomark {
namespace {

std::vector<Clip> Corpus(size_t n, double female_gain_db = 0.0) {
  SyntheticCorpusOptions options;
  options.clips = n;
  options.female_embed_gain_db = female_gain_db;
  return SynthesizeCorpus(options);
}

std::vector<CorpusEntry> Entries(const std::vector<Clip>& clips) {
  std::vector<CorpusEntry> out;
  for (const Clip& c : clips) out.push_back(c.entry);
  return out;
}

PerturbationSpec Spec(PerturbationKind kind, double param,
                      bool enforce = true) {
  PerturbationSpec s;
  s.kind = kind;
  s.param = param;
  s.enforce_range = enforce;
  return s;
}

TEST(StratifiedSampleTest, CoversEveryCellBeforeRepeating) {
  const auto entries = Entries(Corpus(40));
  const auto picked = StratifiedSample(entries, 8, Seed{1});
  ASSERT_EQ(picked.size(), 8u);
  std::set<std::pair<Sex, AgeGroup>> cells;
  for (size_t i : picked) cells.insert({entries[i].sex, entries[i].age});
  EXPECT_EQ(cells.size(), 8u);
  EXPECT_EQ(picked, StratifiedSample(entries, 8, Seed{1}));
  EXPECT_NE(picked, StratifiedSample(entries, 8, Seed{2}));
  EXPECT_EQ(StratifiedSample(entries, 100, Seed{1}).size(), 40u);
}

TEST(RunNoboxTest, NearIdentityAtCalibratedTau) {
  RunConfig run;
  for (SchemeKind k : {SchemeKind::kSpreadSpectrum, SchemeKind::kSyncPayload,
                       SchemeKind::kProbability}) {
    run.schemes.push_back(DefaultSchemeConfig(k));
  }
  run.conditions = {Spec(PerturbationKind::kGaussianNoise, 120.0, false)};
  run.calibrate = true;
  const EvalReport report = RunNobox(run, Corpus(16));
  EXPECT_FALSE(report.degraded);
  int overall = 0;
  for (const ReportRow& r : report.rows) {
    if (r.group != "overall") continue;
    ++overall;
    EXPECT_EQ(r.n, 16u);
    EXPECT_EQ(r.fnr, 0.0) << r.scheme;
    EXPECT_EQ(r.fpr, 0.0) << r.scheme;
    EXPECT_GT(r.mean_snr_db, 100.0);
  }
  EXPECT_EQ(overall, 3);
  EXPECT_EQ(report.metadata.thresholds.size(), 3u);
}

TEST(RunNoboxTest, RowsPartitionAndCountsAreIntegers) {
  RunConfig run;
  run.schemes = {DefaultSchemeConfig(SchemeKind::kSpreadSpectrum)};
  run.conditions = {Spec(PerturbationKind::kGaussianNoise, 10.0),
                    Spec(PerturbationKind::kQuantization, 8.0)};
  const EvalReport report = RunNobox(run, Corpus(24));
  std::map<std::string, size_t> overall_n;
  std::map<std::string, std::map<std::string, size_t>> by_attribute;
  for (const ReportRow& r : report.rows) {
    const std::string key = r.condition + ":" + std::to_string(r.param);
    EXPECT_GT(r.n, 0u);
    const double missed = r.fnr * r.n, alarms = r.fpr * r.n;
    EXPECT_NEAR(missed, std::round(missed), 1e-9);
    EXPECT_NEAR(alarms, std::round(alarms), 1e-9);
    if (r.group == "overall") {
      overall_n[key] = r.n;
    } else {
      by_attribute[key][r.group.substr(0, r.group.find('='))] += r.n;
    }
  }
  ASSERT_EQ(overall_n.size(), 2u);
  for (const auto& [key, attrs] : by_attribute) {
    ASSERT_EQ(attrs.size(), 3u);
    for (const auto& [attr, n] : attrs) EXPECT_EQ(n, overall_n[key]) << attr;
  }
}

TEST(RunNoboxTest, Reproducible) {
  RunConfig run;
  run.schemes = {DefaultSchemeConfig(SchemeKind::kProbability)};
  run.conditions = {Spec(PerturbationKind::kGaussianNoise, 20.0),
                    Spec(PerturbationKind::kEncodecLike, 6.0)};
  const auto clips = Corpus(8);
  run.jobs = 1;
  const EvalReport a = RunNobox(run, clips);
  run.jobs = 3;
  const EvalReport b = RunNobox(run, clips);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    // NaN-free here, so == is exact equality of every field.
    EXPECT_TRUE(a.rows[i] == b.rows[i]) << i;
  }
}

TEST(RunNoboxTest, UnconfiguredCodecsAreSkipped) {
  RunConfig run;
  run.schemes = {DefaultSchemeConfig(SchemeKind::kSpreadSpectrum)};
  run.conditions = {Spec(PerturbationKind::kMp3Ext, 16.0),
                    Spec(PerturbationKind::kSmooth, 6.0)};
  CodecRegistry none;
  run.codecs = &none;
  const EvalReport report = RunNobox(run, Corpus(4));
  ASSERT_EQ(report.metadata.skipped_conditions.size(), 1u);
  EXPECT_EQ(report.metadata.skipped_conditions[0], "mp3_ext:16");
  for (const ReportRow& r : report.rows) EXPECT_EQ(r.condition, "smooth");

  run.skip_unavailable_codecs = false;
  const EvalReport failing = RunNobox(run, Corpus(4));
  EXPECT_EQ(failing.failed_samples, 4u);
}

TEST(RunAttackTest, HsjaQueryBudgetPerRow) {
  RunConfig run;
  run.schemes = {DefaultSchemeConfig(SchemeKind::kSpreadSpectrum)};
  AttackRunConfig attack;
  attack.method = AttackMethod::kHsja;
  attack.budgets = {50};
  attack.oracle.max_queries = 100;
  attack.oracle.grad_est_init = 5;
  attack.oracle.grad_est_cap = 10;
  attack.sample_cap = 4;
  const EvalReport report = RunAttack(run, attack, Corpus(8));
  ASSERT_EQ(report.samples.size(), 4u);
  for (const SampleOutcome& s : report.samples) {
    EXPECT_FALSE(s.failed) << s.error;
    EXPECT_LE(s.queries, 100);
  }
  EXPECT_FALSE(report.traces.empty());
}

TEST(RunAttackTest, WhiteboxNeedsGradients) {
  RunConfig run;
  SchemeConfig ext = DefaultSchemeConfig(SchemeKind::kExternal);
  ext.name = "stub";
  ext.command = "true";
  run.schemes = {ext};
  AttackRunConfig attack;
  attack.budgets = {20};
  try {
    RunAttack(run, attack, Corpus(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGradientUnavailable);
  }
}

TEST(RunAttackTest, WhiteboxRemovesAtTwentyDb) {
  RunConfig run;
  run.schemes = {DefaultSchemeConfig(SchemeKind::kSyncPayload)};
  AttackRunConfig attack;
  attack.budgets = {20};
  attack.sample_cap = 8;
  const EvalReport report = RunAttack(run, attack, Corpus(8));
  ASSERT_FALSE(report.rows.empty());
  EXPECT_EQ(report.rows[0].group, "overall");
  EXPECT_EQ(report.rows[0].fnr, 1.0);
  EXPECT_EQ(report.rows[0].fpr, 1.0);
  EXPECT_GE(report.rows[0].mean_snr_db, 20.0 - 0.01);
}

SampleOutcome Outcome(const std::string& label, Sex sex, double param,
                      bool detected) {
  SampleOutcome s;
  s.scheme = "x";
  s.condition = label;
  s.param = param;
  s.sex = sex;
  s.detected_watermarked = detected;
  s.detected_clean = false;
  return s;
}

TEST(GroupAnalysisTest, IdenticalGroupsAndPooledRows) {
  std::vector<SampleOutcome> samples;
  for (double p : {1.0, 2.0}) {
    for (int i = 0; i < 10; ++i) {
      const bool detected = i % 3 != 0;
      samples.push_back(Outcome("c", Sex::kMale, p, detected));
      samples.push_back(Outcome("c", Sex::kFemale, p, detected));
    }
  }
  const auto cmp = GroupAnalysis(samples, GroupAttribute::kSex, GroupMetric::kFnr);
  ASSERT_EQ(cmp.size(), 3u);  // two parameters plus the pooled row
  EXPECT_FALSE(cmp[2].param.has_value());
  EXPECT_EQ(cmp[2].n_a, 20u);
  for (const GroupComparison& c : cmp) {
    EXPECT_NEAR(c.test.p_value, 1.0, 1e-12);
    EXPECT_FALSE(c.significant);
    EXPECT_TRUE(c.small_sample);
    EXPECT_TRUE(c.error.empty());
  }
}

TEST(GroupAnalysisTest, DegenerateVarianceIsReportedPerPair) {
  std::vector<SampleOutcome> samples;
  for (int i = 0; i < 40; ++i) {
    samples.push_back(Outcome("c", Sex::kMale, 1.0, true));
    samples.push_back(Outcome("c", Sex::kFemale, 1.0, false));
  }
  const auto cmp = GroupAnalysis(samples, GroupAttribute::kSex, GroupMetric::kFnr);
  ASSERT_EQ(cmp.size(), 1u);
  EXPECT_FALSE(cmp[0].small_sample);
  EXPECT_NE(cmp[0].error.find("DegenerateVariance"), std::string::npos)
      << cmp[0].error;
  EXPECT_EQ(cmp[0].rate_a, 1.0);  // female: all missed
  EXPECT_EQ(cmp[0].rate_b, 0.0);
}

}  // namespace
}  // namespace audiomark
