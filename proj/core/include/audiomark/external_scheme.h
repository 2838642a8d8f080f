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

#ifndef AUDIOMARK_EXTERNAL_SCHEME_H_
#define AUDIOMARK_EXTERNAL_SCHEME_H_

#include <string>

#include "audiomark/watermark.h"

namespace audiomark {

// Adapter for a watermarking model living in another process. Each call
// spawns `config.command` through the shell, writes one JSON request line on
// stdin and reads one JSON response from stdout:
//
//   {"op": "embed", "wav_path": ..., "out_path": ..., "bits": "0110..."}
//   {"op": "decode", "wav_path": ...}
//   -> {"ok": true, "bits": "0110...", "prob": 0.93}
//   -> {"ok": false, "error": "..."}
//
// Non-zero exits, timeouts and {"ok": false} raise AdapterError; malformed
// responses raise ProtocolError.
class ExternalScheme : public WatermarkScheme {
 public:
  explicit ExternalScheme(SchemeConfig config);

  const SchemeConfig& config() const override { return config_; }
  Waveform Embed(const Waveform& signal, const WatermarkBits& bits,
                 double strength_gain = 1.0) const override;
  DetectionOutcome Decode(const Waveform& signal,
                          const WatermarkBits& truth) const override;

 private:
  std::string Call(const std::string& request) const;

  SchemeConfig config_;
};

// Command for scheme `name` from AUDIOMARK_SCHEME_<NAME> (upper-cased,
// non-alphanumerics mapped to '_'), or empty.
std::string SchemeCommandFromEnv(const std::string& name);

}  // namespace audiomark

#endif  // AUDIOMARK_EXTERNAL_SCHEME_H_
