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

#ifndef AUDIOMARK_PERTURBATIONS_H_
#define AUDIOMARK_PERTURBATIONS_H_

#include <array>
#include <chrono>
#include <span>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "audiomark/audio.h"
#include "audiomark/random.h"

namespace audiomark {

enum class PerturbationKind {
  kTimeStretch,
  kGaussianNoise,
  kBackgroundNoise,
  kSoundStreamLike,
  kOpusExt,
  kEncodecLike,
  kQuantization,
  kHighpassFilter,
  kLowpassFilter,
  kSmooth,
  kEcho,
  kMp3Ext,
};

inline constexpr std::array<PerturbationKind, 12> kAllPerturbationKinds = {
    PerturbationKind::kTimeStretch,    PerturbationKind::kGaussianNoise,
    PerturbationKind::kBackgroundNoise, PerturbationKind::kSoundStreamLike,
    PerturbationKind::kOpusExt,        PerturbationKind::kEncodecLike,
    PerturbationKind::kQuantization,   PerturbationKind::kHighpassFilter,
    PerturbationKind::kLowpassFilter,  PerturbationKind::kSmooth,
    PerturbationKind::kEcho,           PerturbationKind::kMp3Ext,
};

std::string_view PerturbationKindName(PerturbationKind kind);
PerturbationKind ParsePerturbationKind(std::string_view name);

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
  std::string_view meaning;
};

ParamRange PerturbationRange(PerturbationKind kind);
// Five parameter values spanning the range, used by the table3 suite.
std::vector<double> DefaultParameterGrid(PerturbationKind kind);
// Codec registry name used by the external and overridable kinds, or empty.
std::string_view CodecNameFor(PerturbationKind kind);

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::kGaussianNoise;
  double param = 20.0;
  Seed seed{0};
  // BackgroundNoise source: a WAV file, a directory of WAVs or a manifest.
  std::filesystem::path noise_corpus;
  // When false the parameter may leave the published range (still subject
  // to the kind's basic sanity checks); used for near-identity probes.
  bool enforce_range = true;

  // Throws RangeError.
  void Validate() const;
  std::string Label() const;
};

struct PerturbationPipeline {
  std::vector<PerturbationSpec> stages;

  // One "kind param" pair per line; '#' starts a comment.
  static PerturbationPipeline Parse(std::string_view text, Seed seed);
  static PerturbationPipeline Load(const std::filesystem::path& path, Seed seed);
  std::string Label() const;
};

// External codec commands. A template is either a single round-trip command
// with {in}, {out} and {param}, or an encode/decode pair; in a pair the
// encoder needs all three placeholders and the decoder {in} and {out}.
class CodecRegistry {
 public:
  struct Template {
    std::string roundtrip;
    std::string encode;
    std::string decode;
  };

  CodecRegistry();

  void Register(const std::string& name, const std::string& roundtrip);
  void RegisterPair(const std::string& name, const std::string& encode,
                    const std::string& decode);
  bool Has(const std::string& name) const;
  std::vector<std::string> Names() const;

  // Reads AUDIOMARK_CODEC_<NAME> or AUDIOMARK_CODEC_<NAME>_ENCODE/_DECODE for
  // the known codec names (mp3, opus, soundstream, encodec).
  static CodecRegistry FromEnvironment();

  void set_max_concurrent(int n);
  void set_timeout(std::chrono::milliseconds timeout) { timeout_ = timeout; }

  // Round-trips through the codec; output is resampled and trimmed or
  // zero-padded to the input rate and length. Throws CodecUnavailable or
  // CodecError (with the command's stderr).
  Waveform Run(const std::string& name, const Waveform& input,
               double param) const;

 private:
  struct Limiter;

  std::map<std::string, Template> templates_;
  std::shared_ptr<Limiter> limiter_;
  std::chrono::milliseconds timeout_{120000};
};

Waveform Apply(const PerturbationSpec& spec, const Waveform& signal,
               const CodecRegistry* codecs = nullptr);
// Errors are rethrown with the failing stage index attached.
Waveform ApplyPipeline(const PerturbationPipeline& pipeline,
                       const Waveform& signal,
                       const CodecRegistry* codecs = nullptr);

// Adds `noise` scaled so that snr(signal, result) equals `snr_db`.
Waveform MixAtSnr(const Waveform& signal, std::span<const double> noise,
                  double snr_db);

}  // namespace audiomark

#endif  // AUDIOMARK_PERTURBATIONS_H_
