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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "audiomark/errors.h"
#include "audiomark/metrics.h"
#include "audiomark/parallel.h"

namespace audiomark {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDegradedFraction = 0.10;

std::string FormatNumber(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

double EmbedGain(const CorpusEntry& entry) {
  return std::pow(10.0, entry.embed_gain_db / 20.0);
}

struct SchemeSet {
  std::vector<std::unique_ptr<WatermarkScheme>> schemes;

  explicit SchemeSet(const std::vector<SchemeConfig>& configs) {
    for (const SchemeConfig& c : configs) schemes.push_back(MakeScheme(c));
  }
};

// Watermarked copies of the selected clips; failed embeddings leave an
// error message instead.
struct Embedded {
  std::vector<Waveform> audio;
  std::vector<std::string> error;
};

Embedded EmbedAll(const WatermarkScheme& scheme, const std::vector<Clip>& clips,
                  const std::vector<size_t>& selection, Seed seed, size_t jobs) {
  Embedded out;
  out.audio.resize(selection.size());
  out.error.resize(selection.size());
  const size_t bits = scheme.config().payload_bits;
  ParallelFor(selection.size(), jobs, [&](size_t k) {
    const size_t i = selection[k];
    try {
      out.audio[k] = scheme.Embed(clips[i].audio, ClipPayload(seed, i, bits),
                                  EmbedGain(clips[i].entry));
    } catch (const Error& e) {
      out.error[k] = e.what();
    }
  });
  return out;
}

CalibrationResult CalibrateOn(const WatermarkScheme& scheme, const std::vector<Clip>& clips,
                   const std::vector<size_t>& selection,
                   const Embedded& embedded, Seed seed, size_t jobs) {
  const size_t bits = scheme.config().payload_bits;
  std::vector<DetectionOutcome> marked(selection.size());
  std::vector<DetectionOutcome> clean(selection.size());
  ParallelFor(selection.size(), jobs, [&](size_t k) {
    if (!embedded.error[k].empty()) {
      Fail(ErrorCode::kInvalidArgument,
           "calibration needs every clip embedded: " + embedded.error[k]);
    }
    const WatermarkBits payload = ClipPayload(seed, selection[k], bits);
    marked[k] = scheme.Decode(embedded.audio[k], payload);
    clean[k] = scheme.Decode(clips[selection[k]].audio, payload);
  });
  const std::vector<double> grid =
      DefaultThresholdGrid(scheme.family(), bits);
  return CalibrateThreshold(scheme.family(), marked, clean, grid);
}

std::vector<size_t> AllIndices(size_t n) {
  std::vector<size_t> v(n);
  for (size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

SampleOutcome BlankOutcome(const std::string& scheme,
                           const std::string& condition, double param,
                           const Clip& clip, size_t index) {
  SampleOutcome o;
  o.scheme = scheme;
  o.condition = condition;
  o.param = param;
  o.clip = index;
  o.sex = clip.entry.sex;
  o.age = clip.entry.age;
  o.language = clip.entry.language;
  o.snr_db = kNaN;
  o.quality = kNaN;
  return o;
}

void FinishReport(EvalReport& report, uint64_t seed) {
  report.failed_samples = 0;
  for (const SampleOutcome& s : report.samples) {
    report.failed_samples += s.failed ? 1 : 0;
  }
  report.degraded = !report.samples.empty() &&
                    report.failed_samples >
                        kDegradedFraction * report.samples.size();
  report.rows = AggregateRows(report.samples, seed);
}

std::string ErrorText(const std::exception& e) { return e.what(); }

void EchoRunConfig(const RunConfig& run, RunMetadata& metadata) {
  auto& out = metadata.settings;
  out["run.calibrate"] = run.calibrate ? "true" : "false";
  out["run.sample_cap"] = std::to_string(run.sample_cap);
  for (const SchemeConfig& s : run.schemes) {
    const std::string p = "scheme." + s.name + ".";
    out[p + "kind"] = std::string(SchemeKindName(s.kind));
    out[p + "payload_bits"] = std::to_string(s.payload_bits);
    out[p + "embed_strength"] = FormatNumber(s.embed_strength);
    out[p + "sharpness"] = FormatNumber(s.sharpness);
    out[p + "threshold"] = FormatNumber(s.threshold);
    out[p + "sync_pattern"] = s.sync_pattern.ToString();
    out[p + "key"] = std::to_string(s.key.value);
    out[p + "stft.window_size"] = std::to_string(s.stft.window_size);
    out[p + "stft.hop_size"] = std::to_string(s.stft.hop_size);
    out[p + "band_low_hz"] = FormatNumber(s.band_low_hz);
    out[p + "band_high_hz"] = FormatNumber(s.band_high_hz);
    if (!s.command.empty()) out[p + "command"] = s.command;
  }
  std::string conditions;
  for (const PerturbationSpec& c : run.conditions) {
    if (!conditions.empty()) conditions += ' ';
    conditions += c.Label();
  }
  if (!conditions.empty()) out["run.conditions"] = conditions;
}

}  // namespace

void RunConfig::Validate() const {
  if (schemes.empty()) Fail(ErrorCode::kInvalidArgument, "no schemes configured");
  std::set<std::string> names;
  for (const SchemeConfig& s : schemes) {
    if (s.name.empty() || !names.insert(s.name).second) {
      Fail(ErrorCode::kInvalidArgument,
           "scheme names must be unique and non-empty");
    }
  }
}

std::string_view AttackMethodName(AttackMethod method) {
  switch (method) {
    case AttackMethod::kHsja:
      return "hsja";
    case AttackMethod::kSquare:
      return "square";
    case AttackMethod::kWhitebox:
      return "whitebox";
    case AttackMethod::kIfgsm:
      return "ifgsm";
  }
  return "?";
}

AttackMethod ParseAttackMethod(std::string_view name) {
  for (AttackMethod m : {AttackMethod::kHsja, AttackMethod::kSquare,
                         AttackMethod::kWhitebox, AttackMethod::kIfgsm}) {
    if (name == AttackMethodName(m)) return m;
  }
  Fail(ErrorCode::kInvalidArgument,
       "attack method must be hsja, square, whitebox or ifgsm, got '" +
           std::string(name) + "'");
}

void AttackRunConfig::Validate() const {
  if (budgets.empty()) Fail(ErrorCode::kInvalidArgument, "no attack budgets");
  if (!removal && !forgery) {
    Fail(ErrorCode::kInvalidArgument, "enable removal or forgery");
  }
  if (sample_cap < 1) Fail(ErrorCode::kInvalidArgument, "sample cap must be >= 1");
  oracle.Validate();
  whitebox.Validate();
  for (double b : budgets) {
    if (!std::isfinite(b)) Fail(ErrorCode::kInvalidArgument, "budget not finite");
    if (method == AttackMethod::kHsja && b < 1) {
      Fail(ErrorCode::kInvalidArgument, "HSJA budgets are iteration counts");
    }
    if (method == AttackMethod::kSquare && b < 0) {
      Fail(ErrorCode::kInvalidArgument, "square bounds must be >= 0");
    }
  }
}

std::vector<size_t> StratifiedSample(const std::vector<CorpusEntry>& entries,
                                     size_t cap, Seed seed) {
  if (cap >= entries.size()) return AllIndices(entries.size());
  std::map<std::pair<int, int>, std::vector<size_t>> cells;
  for (size_t i = 0; i < entries.size(); ++i) {
    cells[{static_cast<int>(entries[i].sex), static_cast<int>(entries[i].age)}]
        .push_back(i);
  }
  Rng rng(DeriveSeed(seed, "stratified-sample"));
  std::vector<std::vector<size_t>> queues;
  for (auto& [key, members] : cells) {
    rng.Shuffle(members);
    queues.push_back(members);
  }
  std::vector<size_t> picked;
  for (size_t round = 0; picked.size() < cap; ++round) {
    for (const auto& q : queues) {
      if (round < q.size() && picked.size() < cap) picked.push_back(q[round]);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

WatermarkBits ClipPayload(Seed seed, size_t index, size_t bits) {
  Rng rng(DeriveSeed(DeriveSeed(seed, "payload"), index));
  return WatermarkBits::Random(bits, rng);
}

WatermarkBits ForgeryPayload(Seed seed, size_t index, size_t bits) {
  Rng rng(DeriveSeed(DeriveSeed(seed, "forgery-payload"), index));
  return WatermarkBits::Random(bits, rng);
}

std::vector<PerturbationSpec> Table3Conditions(
    const std::filesystem::path& noise_corpus) {
  std::vector<PerturbationSpec> out;
  for (PerturbationKind kind : kAllPerturbationKinds) {
    for (double param : DefaultParameterGrid(kind)) {
      PerturbationSpec spec;
      spec.kind = kind;
      spec.param = param;
      if (kind == PerturbationKind::kBackgroundNoise) {
        spec.noise_corpus = noise_corpus;
      }
      out.push_back(spec);
    }
  }
  return out;
}

CalibrationResult CalibrateOnCorpus(const SchemeConfig& config,
                                    const std::vector<Clip>& clips, Seed seed,
                                    size_t jobs) {
  if (clips.empty()) Fail(ErrorCode::kInvalidArgument, "corpus is empty");
  const auto scheme = MakeScheme(config);
  const std::vector<size_t> all = AllIndices(clips.size());
  const Embedded embedded = EmbedAll(*scheme, clips, all, seed, jobs);
  return CalibrateOn(*scheme, clips, all, embedded, seed, jobs);
}

std::map<std::string, double> ResolveThresholds(
    const RunConfig& run, const std::vector<Clip>& clips) {
  std::map<std::string, double> out;
  const std::vector<size_t> all = AllIndices(clips.size());
  for (const SchemeConfig& config : run.schemes) {
    if (!run.calibrate) {
      out[config.name] = config.threshold;
      continue;
    }
    const auto scheme = MakeScheme(config);
    const Embedded embedded = EmbedAll(*scheme, clips, all, run.seed, run.jobs);
    out[config.name] =
        CalibrateOn(*scheme, clips, all, embedded, run.seed, run.jobs).tau;
  }
  return out;
}

EvalReport RunNobox(const RunConfig& run, const std::vector<Clip>& clips) {
  run.Validate();
  if (run.conditions.empty()) {
    Fail(ErrorCode::kInvalidArgument, "no-box grid is empty");
  }
  if (clips.empty()) Fail(ErrorCode::kInvalidArgument, "corpus is empty");
  for (const PerturbationSpec& c : run.conditions) c.Validate();

  CodecRegistry env_codecs;
  if (run.codecs == nullptr) env_codecs = CodecRegistry::FromEnvironment();
  const CodecRegistry& codecs = run.codecs ? *run.codecs : env_codecs;

  EvalReport report;
  report.metadata.kind = "nobox";
  report.metadata.seed = run.seed.value;
  report.metadata.stft = run.schemes.front().stft;
  EchoRunConfig(run, report.metadata);

  std::vector<PerturbationSpec> conditions;
  for (const PerturbationSpec& c : run.conditions) {
    const bool external = c.kind == PerturbationKind::kOpusExt ||
                          c.kind == PerturbationKind::kMp3Ext;
    if (external && run.skip_unavailable_codecs &&
        !codecs.Has(std::string(CodecNameFor(c.kind)))) {
      report.metadata.skipped_conditions.push_back(c.Label());
      continue;
    }
    conditions.push_back(c);
  }
  const Seed perturb_seed = DeriveSeed(run.seed, "nobox");
  for (PerturbationSpec& c : conditions) {
    c.seed = DeriveSeed(perturb_seed, c.Label());
  }

  const std::vector<size_t> selection =
      run.sample_cap == 0
          ? AllIndices(clips.size())
          : StratifiedSample(
                [&] {
                  std::vector<CorpusEntry> e;
                  for (const Clip& c : clips) e.push_back(c.entry);
                  return e;
                }(),
                run.sample_cap, run.seed);
  report.metadata.clips = selection.size();

  const SchemeSet set(run.schemes);
  const size_t n_schemes = set.schemes.size();
  std::vector<Embedded> embedded;
  for (size_t s = 0; s < n_schemes; ++s) {
    const WatermarkScheme& scheme = *set.schemes[s];
    embedded.push_back(EmbedAll(scheme, clips, selection, run.seed, run.jobs));
    report.metadata.thresholds[scheme.name()] =
        run.calibrate ? CalibrateOn(scheme, clips, selection, embedded.back(),
                                    run.seed, run.jobs)
                            .tau
                      : scheme.threshold();
  }

  const size_t n_clips = selection.size();
  const size_t n_cond = conditions.size();
  // Layout: [scheme][condition][clip].
  std::vector<SampleOutcome> samples(n_schemes * n_cond * n_clips);
  ParallelFor(n_cond * n_clips, run.jobs, [&](size_t task) {
    const size_t c = task / n_clips;
    const size_t k = task % n_clips;
    const size_t i = selection[k];
    const Clip& clip = clips[i];
    PerturbationSpec spec = conditions[c];
    spec.seed = DeriveSeed(conditions[c].seed, static_cast<uint64_t>(i));
    const std::string condition(PerturbationKindName(spec.kind));

    Waveform clean_perturbed;
    std::string clean_error;
    try {
      clean_perturbed = Apply(spec, clip.audio, &codecs);
    } catch (const std::exception& e) {
      clean_error = ErrorText(e);
    }
    for (size_t s = 0; s < n_schemes; ++s) {
      const WatermarkScheme& scheme = *set.schemes[s];
      SampleOutcome& out = samples[(s * n_cond + c) * n_clips + k];
      out = BlankOutcome(scheme.name(), condition, spec.param, clip, i);
      try {
        if (!embedded[s].error[k].empty()) {
          Fail(ErrorCode::kInvalidArgument, embedded[s].error[k]);
        }
        if (!clean_error.empty()) {
          Fail(ErrorCode::kInvalidArgument, clean_error);
        }
        const double tau = report.metadata.thresholds.at(scheme.name());
        const WatermarkBits payload =
            ClipPayload(run.seed, i, scheme.config().payload_bits);
        const Waveform& marked = embedded[s].audio[k];
        const Waveform marked_perturbed = Apply(spec, marked, &codecs);
        out.detected_watermarked = Decide(
            scheme.family(), scheme.Decode(marked_perturbed, payload), tau);
        out.detected_clean = Decide(
            scheme.family(), scheme.Decode(clean_perturbed, payload), tau);
        if (marked_perturbed.size() == marked.size()) {
          const QualityScore q = ScoreQuality(marked, marked_perturbed);
          out.snr_db = q.snr_db;
          out.quality = q.proxy;
        }
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = ErrorText(e);
        out.detected_watermarked.reset();
        out.detected_clean.reset();
      }
    }
  });
  report.samples = std::move(samples);
  FinishReport(report, run.seed.value);
  return report;
}

namespace {

std::string AttackCondition(const AttackRunConfig& attack) {
  std::string name(AttackMethodName(attack.method));
  if (attack.method == AttackMethod::kHsja) {
    name += "_";
    name += HsjaDomainName(attack.domain);
  }
  return name;
}

AttackResult RunOne(const AttackRunConfig& attack, double budget,
                    const WatermarkScheme& scheme, double tau,
                    const Waveform& signal, const WatermarkBits& bits,
                    AttackGoal goal, Seed seed) {
  switch (attack.method) {
    case AttackMethod::kWhitebox:
    case AttackMethod::kIfgsm: {
      WhiteboxConfig config = attack.whitebox;
      config.snr_budget_db = budget;
      config.variant = attack.method == AttackMethod::kIfgsm
                           ? WhiteboxVariant::kIfgsm
                           : WhiteboxVariant::kGradientDescent;
      return WhiteboxAttack(signal, bits, goal, scheme, tau, config);
    }
    case AttackMethod::kHsja: {
      OracleBudget ob = attack.oracle;
      ob.max_iterations = static_cast<long>(budget);
      try {
        return Hsja(SchemeDecisionOracle(scheme, bits, tau), signal, goal,
                    attack.domain, ob, seed, attack.hsja);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInitializationFailed) throw;
        // No starting point on the goal side: an unsuccessful attack that
        // leaves the clip as it was.
        AttackResult r;
        r.perturbed = signal;
        r.final_snr = kNaN;
        r.final_quality = {kNaN, kNaN};
        return r;
      }
    }
    case AttackMethod::kSquare: {
      SquareOptions options = attack.square;
      options.stft = scheme.config().stft;
      return SquareAttack(SchemeScoreOracle(scheme, bits), signal, goal, budget,
                          attack.oracle, seed,
                          SchemeDecisionOracle(scheme, bits, tau), options);
    }
  }
  Fail(ErrorCode::kInvalidArgument, "unknown attack method");
}

}  // namespace

EvalReport RunAttack(const RunConfig& run, const AttackRunConfig& attack,
                     const std::vector<Clip>& clips) {
  run.Validate();
  attack.Validate();
  if (clips.empty()) Fail(ErrorCode::kInvalidArgument, "corpus is empty");

  EvalReport report;
  report.metadata.kind = std::string(AttackMethodName(attack.method));
  report.metadata.seed = run.seed.value;
  report.metadata.stft = run.schemes.front().stft;
  report.metadata.rescale_mode =
      std::string(RescaleModeName(attack.whitebox.rescale));
  EchoRunConfig(run, report.metadata);
  auto& settings = report.metadata.settings;
  settings["attack.condition"] = AttackCondition(attack);
  settings["attack.removal"] = attack.removal ? "true" : "false";
  settings["attack.forgery"] = attack.forgery ? "true" : "false";
  settings["attack.sample_cap"] = std::to_string(attack.sample_cap);
  settings["oracle.max_iterations"] = std::to_string(attack.oracle.max_iterations);
  settings["oracle.max_queries"] = std::to_string(attack.oracle.max_queries);
  settings["oracle.grad_est_init"] = std::to_string(attack.oracle.grad_est_init);
  settings["oracle.grad_est_cap"] = std::to_string(attack.oracle.grad_est_cap);
  settings["hsja.bisection_steps"] = std::to_string(attack.hsja.bisection_steps);
  settings["hsja.ladder_step_db"] = FormatNumber(attack.hsja.ladder_step_db);
  settings["square.p_init"] = FormatNumber(attack.square.p_init);
  settings["whitebox.iterations"] = std::to_string(attack.whitebox.iterations);
  settings["whitebox.learning_rate"] =
      FormatNumber(attack.whitebox.learning_rate);

  const SchemeSet set(run.schemes);
  if (attack.method == AttackMethod::kWhitebox ||
      attack.method == AttackMethod::kIfgsm) {
    for (const auto& s : set.schemes) {
      if (!s->SupportsGradient()) {
        Fail(ErrorCode::kGradientUnavailable,
             "scheme '" + s->name() + "' exposes no gradient");
      }
    }
  }

  std::vector<CorpusEntry> entries;
  for (const Clip& c : clips) entries.push_back(c.entry);
  size_t cap = attack.sample_cap;
  if (run.sample_cap > 0) cap = std::min(cap, run.sample_cap);
  const std::vector<size_t> selection = StratifiedSample(entries, cap, run.seed);
  report.metadata.clips = selection.size();

  const std::string condition = AttackCondition(attack);
  const size_t n_schemes = set.schemes.size();
  const size_t n_budgets = attack.budgets.size();
  const size_t n_clips = selection.size();
  std::vector<SampleOutcome> samples(n_schemes * n_budgets * n_clips);
  std::vector<std::vector<AttackTrace>> traces(samples.size());
  const Seed attack_seed = DeriveSeed(run.seed, "attack");

  for (size_t s = 0; s < n_schemes; ++s) {
    const WatermarkScheme& scheme = *set.schemes[s];
    const Embedded embedded =
        EmbedAll(scheme, clips, selection, run.seed, run.jobs);
    const double tau =
        run.calibrate ? CalibrateOn(scheme, clips, selection, embedded,
                                    run.seed, run.jobs)
                            .tau
                      : scheme.threshold();
    report.metadata.thresholds[scheme.name()] = tau;
    const size_t bits = scheme.config().payload_bits;

    ParallelFor(n_budgets * n_clips, run.jobs, [&](size_t task) {
      const size_t b = task / n_clips;
      const size_t k = task % n_clips;
      const size_t i = selection[k];
      const size_t slot = (s * n_budgets + b) * n_clips + k;
      const double budget = attack.budgets[b];
      SampleOutcome& out = samples[slot];
      out = BlankOutcome(scheme.name(), condition, budget, clips[i], i);
      const Seed clip_seed = DeriveSeed(
          DeriveSeed(DeriveSeed(attack_seed, scheme.name()), b), i);
      try {
        if (!embedded.error[k].empty()) {
          Fail(ErrorCode::kInvalidArgument, embedded.error[k]);
        }
        bool have_quality = false;
        auto record = [&](const AttackResult& r, AttackGoal goal) {
          out.queries = std::max(out.queries, r.queries_used);
          if (!have_quality) {
            out.snr_db = r.final_snr;
            out.quality = r.final_quality.proxy;
            have_quality = true;
          }
          if (attack.keep_traces) {
            traces[slot].push_back(
                {scheme.name(), condition, budget, i, goal, r.trace});
          }
        };
        if (attack.removal) {
          const WatermarkBits payload = ClipPayload(run.seed, i, bits);
          const AttackResult r =
              RunOne(attack, budget, scheme, tau, embedded.audio[k], payload,
                     AttackGoal::kRemoval, DeriveSeed(clip_seed, "removal"));
          out.detected_watermarked = Decide(
              scheme.family(), scheme.Decode(r.perturbed, payload), tau);
          record(r, AttackGoal::kRemoval);
        }
        if (attack.forgery) {
          const WatermarkBits forged = ForgeryPayload(run.seed, i, bits);
          const AttackResult r =
              RunOne(attack, budget, scheme, tau, clips[i].audio, forged,
                     AttackGoal::kForgery, DeriveSeed(clip_seed, "forgery"));
          out.detected_clean = Decide(
              scheme.family(), scheme.Decode(r.perturbed, forged), tau);
          record(r, AttackGoal::kForgery);
        }
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = ErrorText(e);
        out.detected_watermarked.reset();
        out.detected_clean.reset();
        traces[slot].clear();
      }
    });
  }
  report.samples = std::move(samples);
  for (auto& t : traces) {
    for (auto& x : t) report.traces.push_back(std::move(x));
  }
  FinishReport(report, run.seed.value);
  return report;
}

std::vector<ReportRow> AggregateRows(const std::vector<SampleOutcome>& samples,
                                     uint64_t seed) {
  using Key = std::tuple<std::string, std::string, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<const SampleOutcome*>> by_key;
  for (const SampleOutcome& s : samples) {
    Key key{s.scheme, s.condition, s.param};
    auto [it, inserted] = by_key.try_emplace(key);
    if (inserted) order.push_back(key);
    if (!s.failed) it->second.push_back(&s);
  }

  std::vector<ReportRow> rows;
  for (const Key& key : order) {
    const auto& members = by_key[key];
    auto make_row = [&](const std::string& group,
                        const std::vector<const SampleOutcome*>& group_members) {
      ReportRow row;
      row.scheme = std::get<0>(key);
      row.condition = std::get<1>(key);
      row.param = std::get<2>(key);
      row.group = group;
      row.n = group_members.size();
      row.seed = seed;
      size_t missed = 0, removal_n = 0, alarms = 0, forgery_n = 0;
      double snr = 0.0, quality = 0.0;
      size_t snr_n = 0, quality_n = 0;
      for (const SampleOutcome* s : group_members) {
        if (s->detected_watermarked) {
          ++removal_n;
          missed += *s->detected_watermarked ? 0 : 1;
        }
        if (s->detected_clean) {
          ++forgery_n;
          alarms += *s->detected_clean ? 1 : 0;
        }
        if (!std::isnan(s->snr_db)) {
          snr += s->snr_db;
          ++snr_n;
        }
        if (!std::isnan(s->quality)) {
          quality += s->quality;
          ++quality_n;
        }
      }
      row.fnr = removal_n ? static_cast<double>(missed) / removal_n : kNaN;
      row.fpr = forgery_n ? static_cast<double>(alarms) / forgery_n : kNaN;
      row.mean_snr_db = snr_n ? snr / snr_n : kNaN;
      row.mean_quality = quality_n ? quality / quality_n : kNaN;
      rows.push_back(std::move(row));
    };
    if (members.empty()) continue;
    make_row("overall", members);

    std::map<int, std::vector<const SampleOutcome*>> sexes, ages;
    std::map<std::string, std::vector<const SampleOutcome*>> languages;
    for (const SampleOutcome* s : members) {
      sexes[static_cast<int>(s->sex)].push_back(s);
      ages[static_cast<int>(s->age)].push_back(s);
      languages[s->language].push_back(s);
    }
    for (const auto& [sex, group] : sexes) {
      make_row("sex=" + std::string(SexName(static_cast<Sex>(sex))), group);
    }
    for (const auto& [age, group] : ages) {
      make_row("age=" + std::string(AgeGroupName(static_cast<AgeGroup>(age))),
               group);
    }
    for (const auto& [language, group] : languages) {
      make_row("language=" + language, group);
    }
  }
  return rows;
}

std::string_view GroupAttributeName(GroupAttribute attribute) {
  switch (attribute) {
    case GroupAttribute::kSex:
      return "sex";
    case GroupAttribute::kAge:
      return "age";
    case GroupAttribute::kLanguage:
      return "language";
  }
  return "?";
}

GroupAttribute ParseGroupAttribute(std::string_view name) {
  for (GroupAttribute a :
       {GroupAttribute::kSex, GroupAttribute::kAge, GroupAttribute::kLanguage}) {
    if (name == GroupAttributeName(a)) return a;
  }
  Fail(ErrorCode::kInvalidArgument,
       "group attribute must be sex, age or language");
}

namespace {

std::string GroupLabel(const SampleOutcome& s, GroupAttribute attribute) {
  switch (attribute) {
    case GroupAttribute::kSex:
      return std::string(SexName(s.sex));
    case GroupAttribute::kAge:
      return std::string(AgeGroupName(s.age));
    case GroupAttribute::kLanguage:
      return s.language;
  }
  return {};
}

std::optional<double> Indicator(const SampleOutcome& s, GroupMetric metric) {
  if (s.failed) return std::nullopt;
  if (metric == GroupMetric::kFnr) {
    if (!s.detected_watermarked) return std::nullopt;
    return *s.detected_watermarked ? 0.0 : 1.0;
  }
  if (!s.detected_clean) return std::nullopt;
  return *s.detected_clean ? 1.0 : 0.0;
}

double Mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? kNaN : acc / v.size();
}

void ComparePairs(const std::string& scheme, const std::string& condition,
                  std::optional<double> param,
                  const std::map<std::string, std::vector<double>>& groups,
                  double alpha, std::vector<GroupComparison>& out) {
  for (auto a = groups.begin(); a != groups.end(); ++a) {
    for (auto b = std::next(a); b != groups.end(); ++b) {
      GroupComparison cmp;
      cmp.scheme = scheme;
      cmp.condition = condition;
      cmp.param = param;
      cmp.group_a = a->first;
      cmp.group_b = b->first;
      cmp.n_a = a->second.size();
      cmp.n_b = b->second.size();
      cmp.rate_a = Mean(a->second);
      cmp.rate_b = Mean(b->second);
      cmp.small_sample = cmp.n_a < kSmallGroupSize || cmp.n_b < kSmallGroupSize;
      try {
        cmp.test = WelchTTest(a->second, b->second);
        cmp.significant = cmp.test.p_value < alpha;
      } catch (const Error& e) {
        cmp.error = e.what();
        cmp.test.t = kNaN;
        cmp.test.df = kNaN;
        cmp.test.p_value = kNaN;
      }
      out.push_back(std::move(cmp));
    }
  }
}

}  // namespace

std::vector<GroupComparison> GroupAnalysis(
    const std::vector<SampleOutcome>& samples, GroupAttribute attribute,
    GroupMetric metric, double alpha) {
  using CondKey = std::pair<std::string, std::string>;
  std::vector<CondKey> cond_order;
  std::map<CondKey, std::vector<double>> params;
  std::map<std::tuple<std::string, std::string, double>,
           std::map<std::string, std::vector<double>>>
      per_param;
  std::map<CondKey, std::map<std::string, std::vector<double>>> pooled;
  for (const SampleOutcome& s : samples) {
    const std::optional<double> x = Indicator(s, metric);
    if (!x) continue;
    const CondKey ck{s.scheme, s.condition};
    if (!params.count(ck)) cond_order.push_back(ck);
    auto& plist = params[ck];
    if (std::find(plist.begin(), plist.end(), s.param) == plist.end()) {
      plist.push_back(s.param);
    }
    const std::string label = GroupLabel(s, attribute);
    per_param[{s.scheme, s.condition, s.param}][label].push_back(*x);
    pooled[ck][label].push_back(*x);
  }

  std::vector<GroupComparison> out;
  for (const CondKey& ck : cond_order) {
    for (double p : params[ck]) {
      ComparePairs(ck.first, ck.second, p, per_param[{ck.first, ck.second, p}],
                   alpha, out);
    }
    if (params[ck].size() > 1) {
      ComparePairs(ck.first, ck.second, std::nullopt, pooled[ck], alpha, out);
    }
  }
  return out;
}

}  // namespace audiomark
