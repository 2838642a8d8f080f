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

#ifndef AUDIOMARK_CORPUS_H_
#define AUDIOMARK_CORPUS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "audiomark/audio.h"
#include "audiomark/random.h"

namespace audiomark {

enum class Sex { kMale, kFemale, kUnknown };
enum class AgeGroup { kTeens, kTwenties, kThirties, kForties, kUnknown };

std::string_view SexName(Sex sex);
std::string_view AgeGroupName(AgeGroup age);
// Throw ManifestError for labels outside the closed sets.
Sex ParseSex(std::string_view text);
AgeGroup ParseAgeGroup(std::string_view text);

struct CorpusEntry {
  std::filesystem::path path;  // as written in the manifest
  std::string language;
  Sex sex = Sex::kUnknown;
  AgeGroup age = AgeGroup::kUnknown;
  // Optional per-clip change of the embedding strength, in dB.
  double embed_gain_db = 0.0;
};

// JSON-lines manifest: one {"path", "language", "sex", "age"} object per
// line. Relative paths are resolved against the manifest's directory.
struct CorpusManifest {
  std::filesystem::path base_dir;
  std::vector<CorpusEntry> entries;

  std::filesystem::path Resolve(const CorpusEntry& entry) const;
};

// Throws ManifestError for malformed lines, unknown labels or missing files.
CorpusManifest LoadManifest(const std::filesystem::path& path);
void SaveManifest(const CorpusManifest& manifest,
                  const std::filesystem::path& path);

struct Clip {
  CorpusEntry entry;
  Waveform audio;
};

// Loads every clip, resampled to `sample_rate`.
std::vector<Clip> LoadClips(const CorpusManifest& manifest,
                            int sample_rate = kDefaultSampleRate);

struct SyntheticCorpusOptions {
  size_t clips = 200;
  double duration_seconds = 1.0;
  int sample_rate = kDefaultSampleRate;
  int languages = 25;
  Seed seed{7};
  // Embedding gain recorded for every female clip (0 for none).
  double female_embed_gain_db = 0.0;
};

// Speech-like clip: filtered noise excitation through three time-varying
// formant resonators with a syllabic envelope.
Waveform SynthesizeClip(Seed seed, double duration_seconds, int sample_rate);

// Labels cycle through 2 sexes x 4 age groups x `languages` tags, so every
// (sex, age) cell is populated once the corpus has 8 clips.
std::vector<Clip> SynthesizeCorpus(const SyntheticCorpusOptions& options);

// Writes clip_XXXX.wav files and manifest.jsonl into `dir`; returns the
// manifest (also reloadable with LoadManifest).
CorpusManifest WriteSyntheticCorpus(const SyntheticCorpusOptions& options,
                                    const std::filesystem::path& dir);

}  // namespace audiomark

#endif  // AUDIOMARK_CORPUS_H_
