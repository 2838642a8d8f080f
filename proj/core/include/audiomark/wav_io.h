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

#ifndef AUDIOMARK_WAV_IO_H_
#define AUDIOMARK_WAV_IO_H_

#include <filesystem>
#include <string>

#include "audiomark/audio.h"

namespace audiomark {

// Reads integer PCM WAV (8/16/24/32 bit). Multi-channel input is downmixed
// by averaging. Throws FormatError for malformed files and
// UnsupportedEncoding for non-PCM data.
Waveform ReadWav(const std::filesystem::path& path);
Waveform ParseWav(const std::string& bytes);

// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] here and nowhere
// else in the library.
void WriteWav(const std::filesystem::path& path, const Waveform& signal);
std::string EncodeWav(const Waveform& signal);

}  // namespace audiomark

#endif  // AUDIOMARK_WAV_IO_H_
