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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "audiomark/corpus.h"
#include "audiomark/errors.h"
#include "audiomark/external_scheme.h"
#include "audiomark/harness.h"
#include "audiomark/perturbations.h"
#include "audiomark/report.h"
#include "audiomark/wav_io.h"
#include "audiomark/watermark.h"

namespace audiomark::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  uint64_t seed = 7;
  size_t jobs = 0;
};

struct CorpusOptions {
  std::string manifest;
  size_t synthetic = 200;
  double duration = 1.0;
  double female_gain_db = 0.0;
};

void AddCorpusOptions(CLI::App* cmd, CorpusOptions& c) {
  cmd->add_option("--manifest", c.manifest, "JSON Lines corpus manifest");
  cmd->add_option("--synthetic", c.synthetic,
                  "Synthetic clip count when no manifest is given")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--duration", c.duration, "Synthetic clip length in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--female-gain-db", c.female_gain_db,
                  "Embedding gain for female synthetic clips");
}

std::vector<Clip> LoadCorpus(const CorpusOptions& c, Seed seed) {
  if (!c.manifest.empty()) return LoadClips(LoadManifest(c.manifest));
  SyntheticCorpusOptions options;
  options.clips = c.synthetic;
  options.duration_seconds = c.duration;
  options.seed = seed;
  options.female_embed_gain_db = c.female_gain_db;
  return SynthesizeCorpus(options);
}

// "spread_spectrum", "sync_payload", "probability" or "external:<name>".
SchemeConfig SchemeFromFlag(const std::string& flag,
                            const std::string& external_family) {
  const std::string prefix = "external:";
  if (flag.rfind(prefix, 0) == 0) {
    SchemeConfig config = DefaultSchemeConfig(SchemeKind::kExternal);
    config.name = flag.substr(prefix.size());
    config.command = SchemeCommandFromEnv(config.name);
    config.external_family = ParseDetectorFamily(external_family);
    if (config.command.empty()) {
      Fail(ErrorCode::kAdapterError,
           "no command configured for external scheme '" + config.name + "'");
    }
    return config;
  }
  const SchemeKind kind = ParseSchemeKind(flag);
  if (kind == SchemeKind::kExternal) {
    Fail(ErrorCode::kInvalidArgument, "use external:<name> for adapters");
  }
  return DefaultSchemeConfig(kind);
}

std::vector<SchemeConfig> SchemesFromFlags(
    const std::vector<std::string>& flags, const std::string& family) {
  std::vector<std::string> names = flags;
  if (names.empty()) names = {"spread_spectrum", "sync_payload", "probability"};
  std::vector<SchemeConfig> out;
  for (const std::string& n : names) out.push_back(SchemeFromFlag(n, family));
  return out;
}

WatermarkBits BitsFromFlag(const std::string& text, const SchemeConfig& config) {
  const WatermarkBits bits = WatermarkBits::FromString(text);
  if (bits.size() != config.payload_bits) {
    Fail(ErrorCode::kInvalidArgument,
         "--bits has " + std::to_string(bits.size()) + " bits, scheme '" +
             config.name + "' expects " + std::to_string(config.payload_bits));
  }
  return bits;
}

PerturbationSpec ConditionFromFlag(const std::string& text) {
  const size_t colon = text.find(':');
  if (colon == std::string::npos) {
    Fail(ErrorCode::kInvalidArgument,
         "conditions are written kind:param, got '" + text + "'");
  }
  PerturbationSpec spec;
  spec.kind = ParsePerturbationKind(text.substr(0, colon));
  try {
    spec.param = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    Fail(ErrorCode::kInvalidArgument, "bad parameter in '" + text + "'");
  }
  return spec;
}

void WriteGroupTables(const EvalReport& report, const fs::path& dir) {
  for (GroupAttribute a :
       {GroupAttribute::kSex, GroupAttribute::kAge, GroupAttribute::kLanguage}) {
    for (GroupMetric m : {GroupMetric::kFnr, GroupMetric::kFpr}) {
      const std::string name = "groups_" + std::string(GroupAttributeName(a)) +
                               (m == GroupMetric::kFnr ? "_fnr" : "_fpr") +
                               ".csv";
      WriteTextFile(dir / name,
                    FormatGroupCsv(GroupAnalysis(report.samples, a, m)));
    }
  }
}

void PrintSummary(const EvalReport& report, const fs::path& dir,
                  std::ostream& out) {
  out << "rows=" << report.rows.size() << " samples=" << report.samples.size()
      << " failed=" << report.failed_samples
      << " degraded=" << (report.degraded ? 1 : 0) << " out=" << dir.string()
      << "\n";
  for (const std::string& s : report.metadata.skipped_conditions) {
    out << "skipped " << s << " (codec not configured)\n";
  }
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Audio watermark robustness benchmark"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value overlay; flags take precedence");
  CommonOptions common;
  app.add_option("--seed", common.seed, "Root seed");
  app.add_option("--jobs", common.jobs, "Worker threads (0 = all cores)");
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string in_path, out_path, bits_flag, external_family = "bitwise";
  std::vector<std::string> scheme_flags;
  std::optional<double> tau_flag;
  double strength_gain = 1.0;

  auto* embed = app.add_subcommand("embed", "Embed a payload into a WAV file");
  embed->add_option("input", in_path)->required();
  embed->add_option("output", out_path)->required();
  embed->add_option("--scheme", scheme_flags)->expected(1);
  embed->add_option("--bits", bits_flag)->required();
  embed->add_option("--gain", strength_gain, "Embedding strength multiplier");

  auto* detect = app.add_subcommand("detect", "Detect a payload in a WAV file");
  detect->add_option("input", in_path)->required();
  detect->add_option("--scheme", scheme_flags)->expected(1);
  detect->add_option("--bits", bits_flag);
  detect->add_option("--tau", tau_flag, "Threshold (default: scheme's)");

  std::string kind_flag, pipeline_path, noise_corpus;
  double param = 0.0;
  auto* perturb = app.add_subcommand("perturb", "Apply a perturbation");
  perturb->add_option("input", in_path)->required();
  perturb->add_option("output", out_path)->required();
  auto* kind_opt = perturb->add_option("--kind", kind_flag);
  auto* param_opt = perturb->add_option("--param", param, "Key parameter K");
  auto* pipe_opt = perturb->add_option("--pipeline", pipeline_path,
                                       "File of 'kind param' lines");
  perturb->add_option("--noise-corpus", noise_corpus);
  pipe_opt->excludes(kind_opt)->excludes(param_opt);

  CorpusOptions corpus;
  std::string out_dir = "audiomark_out";
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate thresholds");
  AddCorpusOptions(calibrate, corpus);
  calibrate->add_option("--scheme", scheme_flags);
  calibrate->add_option("--external-family", external_family);
  calibrate->add_option("--out", out_dir);

  std::string suite;
  std::vector<std::string> condition_flags;
  bool calibrate_first = false, group_tables = false;
  size_t sample_cap = 0;
  auto* bench = app.add_subcommand("bench", "Run the no-box perturbation grid");
  AddCorpusOptions(bench, corpus);
  bench->add_option("--scheme", scheme_flags);
  bench->add_option("--external-family", external_family);
  bench->add_option("--suite", suite)->check(CLI::IsMember({"table3"}));
  bench->add_option("--condition", condition_flags, "kind:param, repeatable");
  bench->add_option("--noise-corpus", noise_corpus);
  bench->add_flag("--calibrate", calibrate_first);
  bench->add_option("--cap", sample_cap, "Clip cap (0 = all)");
  bench->add_flag("--groups", group_tables, "Write group t-test tables");
  bench->add_option("--out", out_dir);

  std::string method = "whitebox", domain = "spectrogram", rescale;
  std::vector<double> snr_budgets, bounds;
  std::vector<long> iteration_budgets;
  AttackRunConfig attack;
  bool removal_only = false, forgery_only = false;
  auto* attack_cmd = app.add_subcommand("attack", "Run an adversarial attack");
  AddCorpusOptions(attack_cmd, corpus);
  attack_cmd->add_option("--scheme", scheme_flags);
  attack_cmd->add_option("--external-family", external_family);
  attack_cmd->add_option("--method", method)
      ->check(CLI::IsMember({"hsja", "square", "whitebox", "ifgsm"}));
  attack_cmd->add_option("--snr", snr_budgets, "SNR budgets R (white-box)");
  attack_cmd->add_option("--bound", bounds, "l-inf bounds (square)");
  attack_cmd->add_option("--iterations", iteration_budgets,
                         "Iteration budgets (hsja, square)");
  attack_cmd->add_option("--max-queries", attack.oracle.max_queries);
  attack_cmd->add_option("--grad-init", attack.oracle.grad_est_init);
  attack_cmd->add_option("--grad-cap", attack.oracle.grad_est_cap);
  attack_cmd->add_option("--domain", domain)
      ->check(CLI::IsMember({"waveform", "spectrogram"}));
  attack_cmd->add_option("--lr", attack.whitebox.learning_rate);
  attack_cmd->add_option("--wb-iterations", attack.whitebox.iterations);
  attack_cmd->add_option("--rescale", rescale)
      ->check(CLI::IsMember({"power_ratio", "amplitude_exact"}));
  attack_cmd->add_option("--p-init", attack.square.p_init);
  attack_cmd->add_option("--cap", attack.sample_cap, "Attacked clips");
  attack_cmd->add_flag("--removal-only", removal_only);
  attack_cmd->add_flag("--forgery-only", forgery_only);
  attack_cmd->add_flag("--calibrate", calibrate_first);
  attack_cmd->add_flag("--no-traces{false}", attack.keep_traces);
  attack_cmd->add_option("--out", out_dir);

  std::string csv_path;
  auto* report_cmd = app.add_subcommand("report", "Render report CSV as SVG");
  report_cmd->add_option("csv", csv_path)->required();
  report_cmd->add_option("--out", out_dir);

  SyntheticCorpusOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Write a synthetic corpus");
  gen_cmd->add_option("dir", out_dir)->required();
  gen_cmd->add_option("--clips", gen.clips)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--duration", gen.duration_seconds)
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--languages", gen.languages)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--female-gain-db", gen.female_embed_gain_db);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  const Seed seed{common.seed};
  try {
    if (embed->parsed() || detect->parsed()) {
      const SchemeConfig config =
          SchemesFromFlags(scheme_flags.empty()
                               ? std::vector<std::string>{"spread_spectrum"}
                               : scheme_flags,
                           external_family)
              .front();
      const auto scheme = MakeScheme(config);
      const Waveform audio = ReadWav(in_path);
      if (embed->parsed()) {
        WriteWav(out_path, scheme->Embed(audio, BitsFromFlag(bits_flag, config),
                                         strength_gain));
        return kExitOk;
      }
      WatermarkBits truth;
      if (!bits_flag.empty()) {
        truth = BitsFromFlag(bits_flag, config);
      } else if (scheme->family() != DetectorFamily::kProbability) {
        Fail(ErrorCode::kInvalidArgument, "--bits is required for this scheme");
      }
      const DetectionOutcome outcome = scheme->Decode(audio, truth);
      const bool decision = Decide(scheme->family(), outcome,
                                   tau_flag.value_or(scheme->threshold()));
      out << "decision=" << (decision ? 1 : 0)
          << " score=" << FormatDouble(outcome.score) << "\n";
      return decision ? kExitOk : kExitNotDetected;
    }

    if (perturb->parsed()) {
      const Waveform audio = ReadWav(in_path);
      PerturbationPipeline pipeline;
      if (!pipeline_path.empty()) {
        pipeline = PerturbationPipeline::Load(pipeline_path, seed);
      } else {
        if (kind_flag.empty() || param_opt->count() == 0) {
          Fail(ErrorCode::kInvalidArgument,
               "give --kind and --param, or --pipeline");
        }
        PerturbationSpec spec;
        spec.kind = ParsePerturbationKind(kind_flag);
        spec.param = param;
        spec.seed = DeriveSeed(seed, "perturb");
        pipeline.stages.push_back(spec);
      }
      for (PerturbationSpec& s : pipeline.stages) {
        if (s.kind == PerturbationKind::kBackgroundNoise) {
          s.noise_corpus = noise_corpus;
        }
      }
      const CodecRegistry codecs = CodecRegistry::FromEnvironment();
      WriteWav(out_path, ApplyPipeline(pipeline, audio, &codecs));
      return kExitOk;
    }

    if (calibrate->parsed()) {
      const std::vector<Clip> clips = LoadCorpus(corpus, seed);
      int status = kExitOk;
      for (const SchemeConfig& config :
           SchemesFromFlags(scheme_flags, external_family)) {
        const fs::path curve_path =
            fs::path(out_dir) / ("calibration_" + config.name + ".csv");
        try {
          const CalibrationResult r =
              CalibrateOnCorpus(config, clips, seed, common.jobs);
          WriteTextFile(curve_path, FormatCalibrationCsv(r.curve));
          out << "scheme=" << config.name << " tau=" << FormatDouble(r.tau)
              << "\n";
        } catch (const CalibrationInfeasibleError& e) {
          WriteTextFile(curve_path, FormatCalibrationCsv(e.curve()));
          err << "scheme=" << config.name << ": " << e.what() << "\n";
          status = kExitInfeasible;
        }
      }
      return status;
    }

    if (bench->parsed()) {
      RunConfig run;
      run.schemes = SchemesFromFlags(scheme_flags, external_family);
      if (suite == "table3") run.conditions = Table3Conditions(noise_corpus);
      for (const std::string& c : condition_flags) {
        PerturbationSpec spec = ConditionFromFlag(c);
        spec.noise_corpus = noise_corpus;
        run.conditions.push_back(spec);
      }
      if (run.conditions.empty()) {
        Fail(ErrorCode::kInvalidArgument, "give --suite table3 or --condition");
      }
      run.calibrate = calibrate_first;
      run.sample_cap = sample_cap;
      run.seed = seed;
      run.jobs = common.jobs;
      const CodecRegistry codecs = CodecRegistry::FromEnvironment();
      run.codecs = &codecs;
      const EvalReport report = RunNobox(run, LoadCorpus(corpus, seed));
      EmitReport(report, out_dir);
      if (group_tables) WriteGroupTables(report, out_dir);
      PrintSummary(report, out_dir, out);
      return kExitOk;
    }

    if (attack_cmd->parsed()) {
      RunConfig run;
      run.schemes = SchemesFromFlags(scheme_flags, external_family);
      run.calibrate = calibrate_first;
      run.seed = seed;
      run.jobs = common.jobs;
      attack.method = ParseAttackMethod(method);
      attack.domain = ParseHsjaDomain(domain);
      if (!rescale.empty()) attack.whitebox.rescale = ParseRescaleMode(rescale);
      attack.removal = !forgery_only;
      attack.forgery = !removal_only;
      switch (attack.method) {
        case AttackMethod::kWhitebox:
        case AttackMethod::kIfgsm:
          attack.budgets = snr_budgets.empty()
                               ? std::vector<double>{20, 30, 40, 50, 60}
                               : snr_budgets;
          break;
        case AttackMethod::kSquare:
          attack.budgets = bounds.empty()
                               ? std::vector<double>{0.05, 0.1, 0.15, 0.2}
                               : bounds;
          if (!iteration_budgets.empty()) {
            attack.oracle.max_iterations = iteration_budgets.front();
          }
          break;
        case AttackMethod::kHsja:
          for (long it : iteration_budgets) attack.budgets.push_back(it);
          if (attack.budgets.empty()) attack.budgets = {1000};
          break;
      }
      const EvalReport report =
          RunAttack(run, attack, LoadCorpus(corpus, seed));
      EmitReport(report, out_dir);
      PrintSummary(report, out_dir, out);
      return kExitOk;
    }

    if (report_cmd->parsed()) {
      const std::vector<ReportRow> rows = ReadCsv(csv_path);
      if (rows.empty()) Fail(ErrorCode::kEmptyReport, "report has no rows");
      std::vector<std::string> conditions;
      for (const ReportRow& r : rows) {
        if (std::find(conditions.begin(), conditions.end(), r.condition) ==
            conditions.end()) {
          conditions.push_back(r.condition);
        }
      }
      size_t written = 0;
      for (const std::string& c : conditions) {
        for (PlotMetric m : {PlotMetric::kFnr, PlotMetric::kFpr,
                             PlotMetric::kSnr, PlotMetric::kQuality}) {
          try {
            const fs::path p = fs::path(out_dir) /
                               (c + "_" + std::string(PlotMetricName(m)) +
                                ".svg");
            WriteTextFile(p, RenderSvg(rows, c, m));
            ++written;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kEmptyReport) throw;
          }
        }
      }
      out << "charts=" << written << " out=" << out_dir << "\n";
      return kExitOk;
    }

    if (gen_cmd->parsed()) {
      gen.seed = seed;
      const CorpusManifest manifest = WriteSyntheticCorpus(gen, out_dir);
      out << "clips=" << manifest.entries.size() << " manifest="
          << (fs::path(out_dir) / "manifest.jsonl").string() << "\n";
      return kExitOk;
    }
  } catch (const CalibrationInfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (e.stage()) err << " (stage " << *e.stage() << ")";
    err << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace audiomark::cli
