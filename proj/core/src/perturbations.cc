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

#include "audiomark/perturbations.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "audiomark/corpus.h"
#include "audiomark/errors.h"
#include "audiomark/filters.h"
#include "audiomark/subprocess.h"
#include "audiomark/wav_io.h"

namespace audiomark {
namespace {

constexpr int kFilterOrder = 6;
constexpr double kEchoDecay = 0.5;
constexpr int kEncodecLikeStages = 8;

std::string FormatParam(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string_view PerturbationKindName(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kTimeStretch: return "time_stretch";
    case PerturbationKind::kGaussianNoise: return "gaussian_noise";
    case PerturbationKind::kBackgroundNoise: return "background_noise";
    case PerturbationKind::kSoundStreamLike: return "soundstream_like";
    case PerturbationKind::kOpusExt: return "opus_ext";
    case PerturbationKind::kEncodecLike: return "encodec_like";
    case PerturbationKind::kQuantization: return "quantization";
    case PerturbationKind::kHighpassFilter: return "highpass_filter";
    case PerturbationKind::kLowpassFilter: return "lowpass_filter";
    case PerturbationKind::kSmooth: return "smooth";
    case PerturbationKind::kEcho: return "echo";
    case PerturbationKind::kMp3Ext: return "mp3_ext";
  }
  return "unknown";
}

PerturbationKind ParsePerturbationKind(std::string_view name) {
  for (PerturbationKind kind : kAllPerturbationKinds) {
    if (name == PerturbationKindName(kind)) return kind;
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown perturbation kind '" + std::string(name) + "'");
}

ParamRange PerturbationRange(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kTimeStretch: return {0.7, 1.5, "speed factor"};
    case PerturbationKind::kGaussianNoise: return {5.0, 40.0, "SNR in dB"};
    case PerturbationKind::kBackgroundNoise: return {5.0, 40.0, "SNR in dB"};
    case PerturbationKind::kSoundStreamLike: return {4.0, 16.0, "number of quantizers"};
    case PerturbationKind::kOpusExt: return {16.0, 256.0, "bitrate in kbps"};
    case PerturbationKind::kEncodecLike: return {1.5, 24.0, "bandwidth in kHz"};
    case PerturbationKind::kQuantization: return {4.0, 64.0, "quantization levels"};
    case PerturbationKind::kHighpassFilter: return {0.1, 0.5, "cutoff ratio of Nyquist"};
    case PerturbationKind::kLowpassFilter: return {0.1, 0.5, "cutoff ratio of Nyquist"};
    case PerturbationKind::kSmooth: return {6.0, 22.0, "window length in samples"};
    case PerturbationKind::kEcho: return {0.1, 0.9, "delay in seconds"};
    case PerturbationKind::kMp3Ext: return {8.0, 40.0, "bitrate in kbps"};
  }
  return {};
}

std::vector<double> DefaultParameterGrid(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kTimeStretch: return {0.7, 0.9, 1.1, 1.3, 1.5};
    case PerturbationKind::kGaussianNoise:
    case PerturbationKind::kBackgroundNoise: return {5, 10, 20, 30, 40};
    case PerturbationKind::kSoundStreamLike: return {4, 7, 10, 13, 16};
    case PerturbationKind::kOpusExt: return {16, 32, 64, 128, 256};
    case PerturbationKind::kEncodecLike: return {1.5, 3, 6, 12, 24};
    case PerturbationKind::kQuantization: return {4, 8, 16, 32, 64};
    case PerturbationKind::kHighpassFilter:
    case PerturbationKind::kLowpassFilter: return {0.1, 0.2, 0.3, 0.4, 0.5};
    case PerturbationKind::kSmooth: return {6, 10, 14, 18, 22};
    case PerturbationKind::kEcho: return {0.1, 0.3, 0.5, 0.7, 0.9};
    case PerturbationKind::kMp3Ext: return {8, 16, 24, 32, 40};
  }
  return {};
}

std::string_view CodecNameFor(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::kMp3Ext: return "mp3";
    case PerturbationKind::kOpusExt: return "opus";
    case PerturbationKind::kSoundStreamLike: return "soundstream";
    case PerturbationKind::kEncodecLike: return "encodec";
    default: return "";
  }
}

void PerturbationSpec::Validate() const {
  const std::string name(PerturbationKindName(kind));
  if (!std::isfinite(param)) {
    Fail(ErrorCode::kRangeError, name + " parameter must be finite");
  }
  const ParamRange range = PerturbationRange(kind);
  if (enforce_range && (param < range.lo || param > range.hi)) {
    Fail(ErrorCode::kRangeError,
         name + " " + std::string(range.meaning) + " must lie in [" +
             FormatParam(range.lo) + ", " + FormatParam(range.hi) + "], got " +
             FormatParam(param));
  }
  bool sane = true;
  switch (kind) {
    case PerturbationKind::kTimeStretch:
    case PerturbationKind::kOpusExt:
    case PerturbationKind::kMp3Ext:
    case PerturbationKind::kEncodecLike:
      sane = param > 0.0;
      break;
    case PerturbationKind::kQuantization:
      sane = std::lround(param) >= 2;
      break;
    case PerturbationKind::kSoundStreamLike:
    case PerturbationKind::kSmooth:
      sane = std::lround(param) >= 1;
      break;
    case PerturbationKind::kHighpassFilter:
    case PerturbationKind::kLowpassFilter:
      sane = param > 0.0 && param < 1.0;
      break;
    case PerturbationKind::kEcho:
      sane = param >= 0.0;
      break;
    default:
      break;
  }
  if (!sane) {
    Fail(ErrorCode::kRangeError,
         name + " parameter " + FormatParam(param) + " is not meaningful");
  }
}

std::string PerturbationSpec::Label() const {
  return std::string(PerturbationKindName(kind)) + ":" + FormatParam(param);
}

PerturbationPipeline PerturbationPipeline::Parse(std::string_view text,
                                                 Seed seed) {
  PerturbationPipeline pipeline;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string kind;
    if (!(fields >> kind)) continue;
    double param;
    if (!(fields >> param)) {
      Fail(ErrorCode::kInvalidArgument,
           "pipeline line " + std::to_string(line_no) + ": expected 'kind param'");
    }
    PerturbationSpec spec;
    spec.kind = ParsePerturbationKind(kind);
    spec.param = param;
    spec.seed = DeriveSeed(seed, static_cast<uint64_t>(pipeline.stages.size()));
    pipeline.stages.push_back(spec);
  }
  if (pipeline.stages.empty()) {
    Fail(ErrorCode::kInvalidArgument, "pipeline has no stages");
  }
  return pipeline;
}

PerturbationPipeline PerturbationPipeline::Load(
    const std::filesystem::path& path, Seed seed) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot open pipeline " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str(), seed);
}

std::string PerturbationPipeline::Label() const {
  std::string out;
  for (const auto& stage : stages) {
    if (!out.empty()) out += "+";
    out += stage.Label();
  }
  return out;
}

struct CodecRegistry::Limiter {
  std::mutex mu;
  std::condition_variable cv;
  int available = 1;
};

CodecRegistry::CodecRegistry() : limiter_(std::make_shared<Limiter>()) {
  limiter_->available =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

namespace {

void RequirePlaceholders(const std::string& name, const std::string& text,
                         std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (text.find(key) == std::string::npos) {
      Fail(ErrorCode::kTemplateError,
           "codec '" + name + "' template lacks " + key + ": " + text);
    }
  }
}

}  // namespace

void CodecRegistry::Register(const std::string& name,
                             const std::string& roundtrip) {
  RequirePlaceholders(name, roundtrip, {"{in}", "{out}", "{param}"});
  templates_[name] = Template{roundtrip, "", ""};
}

void CodecRegistry::RegisterPair(const std::string& name,
                                 const std::string& encode,
                                 const std::string& decode) {
  RequirePlaceholders(name, encode, {"{in}", "{out}", "{param}"});
  RequirePlaceholders(name, decode, {"{in}", "{out}"});
  templates_[name] = Template{"", encode, decode};
}

bool CodecRegistry::Has(const std::string& name) const {
  return templates_.count(name) > 0;
}

std::vector<std::string> CodecRegistry::Names() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : templates_) names.push_back(name);
  return names;
}

CodecRegistry CodecRegistry::FromEnvironment() {
  CodecRegistry registry;
  for (const char* name : {"mp3", "opus", "soundstream", "encodec"}) {
    std::string var = "AUDIOMARK_CODEC_";
    for (const char* c = name; *c; ++c) {
      var += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    }
    const char* roundtrip = std::getenv(var.c_str());
    const char* encode = std::getenv((var + "_ENCODE").c_str());
    const char* decode = std::getenv((var + "_DECODE").c_str());
    if (roundtrip && *roundtrip) {
      registry.Register(name, roundtrip);
    } else if (encode && *encode && decode && *decode) {
      registry.RegisterPair(name, encode, decode);
    }
  }
  return registry;
}

void CodecRegistry::set_max_concurrent(int n) {
  std::lock_guard<std::mutex> lock(limiter_->mu);
  limiter_->available = std::max(1, n);
}

Waveform CodecRegistry::Run(const std::string& name, const Waveform& input,
                            double param) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    Fail(ErrorCode::kCodecUnavailable,
         "no command configured for codec '" + name + "' (set AUDIOMARK_CODEC_" +
             [&] {
               std::string up;
               for (char c : name) {
                 up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
               }
               return up;
             }() +
             ")");
  }
  const Template& t = it->second;
  TempDir dir;
  const auto in_path = dir.File("in.wav");
  const auto out_path = dir.File("out.wav");
  WriteWav(in_path, input);
  const std::string param_text = FormatParam(param);

  auto run = [&](std::string command, const std::filesystem::path& in,
                 const std::filesystem::path& out) {
    command = ReplaceAll(command, "{in}", ShellQuote(in.string()));
    command = ReplaceAll(command, "{out}", ShellQuote(out.string()));
    command = ReplaceAll(command, "{param}", param_text);
    {
      std::unique_lock<std::mutex> lock(limiter_->mu);
      limiter_->cv.wait(lock, [&] { return limiter_->available > 0; });
      --limiter_->available;
    }
    ProcessResult result;
    try {
      result = RunShell(command, "", timeout_);
    } catch (...) {
      std::lock_guard<std::mutex> lock(limiter_->mu);
      ++limiter_->available;
      limiter_->cv.notify_one();
      throw;
    }
    {
      std::lock_guard<std::mutex> lock(limiter_->mu);
      ++limiter_->available;
      limiter_->cv.notify_one();
    }
    if (result.timed_out) {
      Fail(ErrorCode::kCodecError, "codec '" + name + "' timed out");
    }
    if (result.exit_code != 0) {
      Fail(ErrorCode::kCodecError, "codec '" + name + "' exited with " +
                                       std::to_string(result.exit_code) +
                                       ": " + result.err);
    }
  };

  if (!t.roundtrip.empty()) {
    run(t.roundtrip, in_path, out_path);
  } else {
    const auto encoded = dir.File("encoded.bin");
    run(t.encode, in_path, encoded);
    run(t.decode, encoded, out_path);
  }
  Waveform out;
  try {
    out = ReadWav(out_path);
  } catch (const Error& e) {
    Fail(ErrorCode::kCodecError,
         "codec '" + name + "' produced no readable WAV: " + e.what());
  }
  out = Resample(out, input.sample_rate);
  out.samples.resize(input.size(), 0.0);
  return out;
}

Waveform MixAtSnr(const Waveform& signal, std::span<const double> noise,
                  double snr_db) {
  if (noise.size() != signal.size()) {
    Fail(ErrorCode::kShapeError, "noise and signal lengths differ");
  }
  const double ps = MeanPower(signal.samples);
  const double pn = MeanPower(noise);
  if (ps == 0.0) Fail(ErrorCode::kUndefinedSnr, "signal is all zeros");
  if (pn == 0.0) Fail(ErrorCode::kUndefinedSnr, "noise is all zeros");
  const double beta = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  Waveform out = signal;
  for (size_t i = 0; i < out.size(); ++i) out.samples[i] += beta * noise[i];
  return out;
}

namespace {

std::vector<std::filesystem::path> NoiseFiles(const std::filesystem::path& source) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(source)) {
    for (const auto& entry : std::filesystem::directory_iterator(source)) {
      if (entry.path().extension() == ".wav") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (source.extension() == ".jsonl") {
    const CorpusManifest manifest = LoadManifest(source);
    for (const auto& e : manifest.entries) files.push_back(manifest.Resolve(e));
  } else {
    files.push_back(source);
  }
  if (files.empty()) {
    Fail(ErrorCode::kIoError, "noise corpus " + source.string() + " has no WAV files");
  }
  return files;
}

std::vector<double> BackgroundNoise(const PerturbationSpec& spec,
                                    const Waveform& signal) {
  Rng rng(spec.seed);
  if (spec.noise_corpus.empty()) return PinkNoise(signal.size(), rng);
  const auto files = NoiseFiles(spec.noise_corpus);
  const auto& file = files[rng.UniformIndex(files.size())];
  const Waveform source = Resample(ReadWav(file), signal.sample_rate);
  if (source.samples.empty()) {
    Fail(ErrorCode::kIoError, "noise file " + file.string() + " is empty");
  }
  const size_t offset = rng.UniformIndex(source.size());
  std::vector<double> noise(signal.size());
  for (size_t i = 0; i < noise.size(); ++i) {
    noise[i] = source.samples[(offset + i) % source.size()];
  }
  return noise;
}

Waveform Quantize(const Waveform& signal, int levels) {
  Waveform out = signal;
  const double step = 2.0 / levels;
  for (double& v : out.samples) {
    const double idx = std::clamp(std::floor((v + 1.0) / step), 0.0,
                                  static_cast<double>(levels - 1));
    v = -1.0 + (idx + 0.5) * step;
  }
  return out;
}

Waveform Echo(const Waveform& signal, double delay_seconds) {
  const size_t delay =
      static_cast<size_t>(std::llround(delay_seconds * signal.sample_rate));
  Waveform out = signal;
  for (size_t i = delay; i < out.size(); ++i) {
    out.samples[i] += kEchoDecay * signal.samples[i - delay];
  }
  const double peak = PeakAbs(out.samples);
  if (peak > 1.0) {
    for (double& v : out.samples) v /= peak;
  }
  return out;
}

}  // namespace

Waveform Apply(const PerturbationSpec& spec, const Waveform& signal,
               const CodecRegistry* codecs) {
  spec.Validate();
  const std::string codec(CodecNameFor(spec.kind));
  if (!codec.empty() && codecs != nullptr && codecs->Has(codec)) {
    return codecs->Run(codec, signal, spec.param);
  }
  switch (spec.kind) {
    case PerturbationKind::kTimeStretch:
      return Waveform{ResampleRatio(signal.samples, 1.0 / spec.param),
                      signal.sample_rate};
    case PerturbationKind::kGaussianNoise: {
      Rng rng(spec.seed);
      return MixAtSnr(signal, rng.GaussianVector(signal.size()), spec.param);
    }
    case PerturbationKind::kBackgroundNoise:
      return MixAtSnr(signal, BackgroundNoise(spec, signal), spec.param);
    case PerturbationKind::kSoundStreamLike:
      return Waveform{
          StandInCodec(signal.samples, signal.sample_rate,
                       signal.sample_rate / 2.0,
                       static_cast<int>(std::lround(spec.param))),
          signal.sample_rate};
    case PerturbationKind::kEncodecLike:
      return Waveform{StandInCodec(signal.samples, signal.sample_rate,
                                   spec.param * 1000.0, kEncodecLikeStages),
                      signal.sample_rate};
    case PerturbationKind::kQuantization:
      return Quantize(signal, static_cast<int>(std::lround(spec.param)));
    case PerturbationKind::kHighpassFilter:
    case PerturbationKind::kLowpassFilter: {
      const auto sections = ButterworthSections(
          kFilterOrder, spec.param,
          spec.kind == PerturbationKind::kHighpassFilter);
      return Waveform{FilterCascade(signal.samples, sections),
                      signal.sample_rate};
    }
    case PerturbationKind::kSmooth: {
      const auto kernel =
          GaussianKernel(static_cast<int>(std::lround(spec.param)));
      return Waveform{ConvolveSameEdge(signal.samples, kernel),
                      signal.sample_rate};
    }
    case PerturbationKind::kEcho:
      return Echo(signal, spec.param);
    case PerturbationKind::kOpusExt:
    case PerturbationKind::kMp3Ext:
      Fail(ErrorCode::kCodecUnavailable,
           std::string(PerturbationKindName(spec.kind)) +
               " needs an external codec; set AUDIOMARK_CODEC_" +
               (spec.kind == PerturbationKind::kMp3Ext ? "MP3" : "OPUS"));
  }
  Fail(ErrorCode::kInvalidArgument, "unhandled perturbation kind");
}

Waveform ApplyPipeline(const PerturbationPipeline& pipeline,
                       const Waveform& signal, const CodecRegistry* codecs) {
  if (pipeline.stages.empty()) {
    Fail(ErrorCode::kInvalidArgument, "pipeline has no stages");
  }
  Waveform current = signal;
  for (size_t i = 0; i < pipeline.stages.size(); ++i) {
    try {
      current = Apply(pipeline.stages[i], current, codecs);
    } catch (const Error& e) {
      throw Error(e.code(), e.message(), static_cast<int>(i));
    }
  }
  return current;
}

}  // namespace audiomark
