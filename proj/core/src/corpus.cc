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

#include "audiomark/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "audiomark/errors.h"
#include "audiomark/wav_io.h"
#include "json.hpp"

namespace audiomark {

using nlohmann::json;

std::string_view SexName(Sex sex) {
  switch (sex) {
    case Sex::kMale: return "male";
    case Sex::kFemale: return "female";
    case Sex::kUnknown: return "unknown";
  }
  return "unknown";
}

std::string_view AgeGroupName(AgeGroup age) {
  switch (age) {
    case AgeGroup::kTeens: return "teens";
    case AgeGroup::kTwenties: return "twenties";
    case AgeGroup::kThirties: return "thirties";
    case AgeGroup::kForties: return "forties";
    case AgeGroup::kUnknown: return "unknown";
  }
  return "unknown";
}

Sex ParseSex(std::string_view text) {
  for (Sex s : {Sex::kMale, Sex::kFemale, Sex::kUnknown}) {
    if (text == SexName(s)) return s;
  }
  Fail(ErrorCode::kManifestError, "unknown sex label '" + std::string(text) + "'");
}

AgeGroup ParseAgeGroup(std::string_view text) {
  for (AgeGroup a : {AgeGroup::kTeens, AgeGroup::kTwenties, AgeGroup::kThirties,
                     AgeGroup::kForties, AgeGroup::kUnknown}) {
    if (text == AgeGroupName(a)) return a;
  }
  Fail(ErrorCode::kManifestError, "unknown age label '" + std::string(text) + "'");
}

std::filesystem::path CorpusManifest::Resolve(const CorpusEntry& entry) const {
  if (entry.path.is_absolute()) return entry.path;
  return base_dir / entry.path;
}

CorpusManifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kManifestError, "cannot open manifest " + path.string());
  CorpusManifest manifest;
  manifest.base_dir = path.parent_path();
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      Fail(ErrorCode::kManifestError, where + ": not valid JSON");
    }
    if (!j.is_object()) Fail(ErrorCode::kManifestError, where + ": not an object");
    for (const char* key : {"path", "language", "sex", "age"}) {
      if (!j.contains(key) || !j[key].is_string()) {
        Fail(ErrorCode::kManifestError,
             where + ": missing string field '" + key + "'");
      }
    }
    CorpusEntry entry;
    entry.path = j["path"].get<std::string>();
    entry.language = j["language"].get<std::string>();
    try {
      entry.sex = ParseSex(j["sex"].get<std::string>());
      entry.age = ParseAgeGroup(j["age"].get<std::string>());
    } catch (const Error& e) {
      Fail(ErrorCode::kManifestError, where + ": " + e.message());
    }
    if (j.contains("embed_gain_db")) {
      if (!j["embed_gain_db"].is_number()) {
        Fail(ErrorCode::kManifestError, where + ": embed_gain_db must be a number");
      }
      entry.embed_gain_db = j["embed_gain_db"].get<double>();
    }
    if (!std::filesystem::exists(manifest.Resolve(entry))) {
      Fail(ErrorCode::kManifestError,
           where + ": file not found: " + manifest.Resolve(entry).string());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

void SaveManifest(const CorpusManifest& manifest,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  for (const CorpusEntry& e : manifest.entries) {
    json j = {{"path", e.path.string()},
              {"language", e.language},
              {"sex", std::string(SexName(e.sex))},
              {"age", std::string(AgeGroupName(e.age))}};
    if (e.embed_gain_db != 0.0) j["embed_gain_db"] = e.embed_gain_db;
    out << j.dump() << "\n";
  }
}

std::vector<Clip> LoadClips(const CorpusManifest& manifest, int sample_rate) {
  std::vector<Clip> clips;
  clips.reserve(manifest.entries.size());
  for (const CorpusEntry& e : manifest.entries) {
    Waveform audio = ReadWav(manifest.Resolve(e));
    clips.push_back({e, Resample(audio, sample_rate)});
  }
  return clips;
}

namespace {

// Two-pole resonator with unit peak gain, retuned as the formant moves.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double a1 = 0.0, a2 = 0.0, gain = 0.0;

  void Tune(double freq_hz, double bandwidth_hz, int sample_rate) {
    const double r = std::exp(-std::numbers::pi * bandwidth_hz / sample_rate);
    const double theta = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    a1 = -2.0 * r * std::cos(theta);
    a2 = r * r;
    gain = (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
  }

  double Step(double x) {
    const double y = gain * x - a1 * y1 - a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

Waveform SynthesizeClip(Seed seed, double duration_seconds, int sample_rate) {
  if (!(duration_seconds > 0.0) || sample_rate <= 0) {
    Fail(ErrorCode::kInvalidArgument, "duration and sample rate must be positive");
  }
  Rng rng(seed);
  const size_t n = static_cast<size_t>(std::llround(duration_seconds * sample_rate));
  const double pi = std::numbers::pi;

  struct Formant {
    double base, depth, rate, phase, bandwidth, level;
  };
  const double ranges[3][2] = {{300.0, 800.0}, {900.0, 2200.0}, {2300.0, 3400.0}};
  Formant formants[3];
  for (int k = 0; k < 3; ++k) {
    formants[k].base = ranges[k][0] + rng.Uniform() * (ranges[k][1] - ranges[k][0]);
    formants[k].depth = (0.1 + 0.15 * rng.Uniform()) * formants[k].base;
    formants[k].rate = 1.0 + 3.0 * rng.Uniform();
    formants[k].phase = 2.0 * pi * rng.Uniform();
    formants[k].bandwidth = 80.0 + 120.0 * rng.Uniform();
    formants[k].level = std::pow(10.0, (-6.0 * k - 4.0 * rng.Uniform()) / 20.0);
  }
  const double syllable_rate = 3.0 + 3.0 * rng.Uniform();
  const double syllable_phase = 2.0 * pi * rng.Uniform();
  const double loudness = 0.08 * std::pow(10.0, (6.0 * rng.Uniform() - 3.0) / 20.0);

  Resonator res[3];
  std::vector<double> out(n, 0.0);
  double tilt = 0.0;
  constexpr int kRetune = 32;
  for (size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    if (i % kRetune == 0) {
      for (int k = 0; k < 3; ++k) {
        const Formant& f = formants[k];
        const double freq =
            f.base + f.depth * std::sin(2.0 * pi * f.rate * t + f.phase);
        res[k].Tune(std::min(freq, 0.45 * sample_rate), f.bandwidth, sample_rate);
      }
    }
    // Spectral tilt on the excitation, roughly -6 dB per octave above 300 Hz.
    tilt = 0.9 * tilt + rng.Gaussian();
    double voiced = 0.0;
    for (int k = 0; k < 3; ++k) voiced += formants[k].level * res[k].Step(tilt);
    const double syllable = std::sin(2.0 * pi * syllable_rate * t + syllable_phase);
    const double envelope = 0.08 + 0.92 * std::pow(std::max(0.0, syllable), 0.7);
    out[i] = envelope * voiced;
  }
  const double rms = std::sqrt(MeanPower(out));
  const double scale = rms > 0.0 ? loudness / rms : 0.0;
  for (double& v : out) v = v * scale + 0.002 * loudness * rng.Gaussian();
  const double peak = PeakAbs(out);
  if (peak > 0.95) {
    for (double& v : out) v *= 0.95 / peak;
  }
  return Waveform{std::move(out), sample_rate};
}

std::vector<Clip> SynthesizeCorpus(const SyntheticCorpusOptions& options) {
  if (options.languages <= 0) {
    Fail(ErrorCode::kInvalidArgument, "need at least one language tag");
  }
  const Seed base = DeriveSeed(options.seed, "synthetic-corpus");
  const Sex sexes[2] = {Sex::kMale, Sex::kFemale};
  const AgeGroup ages[4] = {AgeGroup::kTeens, AgeGroup::kTwenties,
                            AgeGroup::kThirties, AgeGroup::kForties};
  std::vector<Clip> clips;
  clips.reserve(options.clips);
  for (size_t i = 0; i < options.clips; ++i) {
    Clip clip;
    char name[32];
    std::snprintf(name, sizeof(name), "clip_%04zu.wav", i);
    char lang[32];
    std::snprintf(lang, sizeof(lang), "L%02zu", (i / 8) % options.languages + 1);
    clip.entry.path = name;
    clip.entry.language = lang;
    clip.entry.sex = sexes[i % 2];
    clip.entry.age = ages[(i / 2) % 4];
    if (clip.entry.sex == Sex::kFemale) {
      clip.entry.embed_gain_db = options.female_embed_gain_db;
    }
    clip.audio = SynthesizeClip(DeriveSeed(base, static_cast<uint64_t>(i)),
                                options.duration_seconds, options.sample_rate);
    clips.push_back(std::move(clip));
  }
  return clips;
}

CorpusManifest WriteSyntheticCorpus(const SyntheticCorpusOptions& options,
                                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CorpusManifest manifest;
  manifest.base_dir = dir;
  for (Clip& clip : SynthesizeCorpus(options)) {
    WriteWav(dir / clip.entry.path, clip.audio);
    manifest.entries.push_back(clip.entry);
  }
  SaveManifest(manifest, dir / "manifest.jsonl");
  return manifest;
}

}  // namespace audiomark
