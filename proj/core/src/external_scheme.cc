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

#include "audiomark/external_scheme.h"

#include <cctype>
#include <cstdlib>

#include "audiomark/metrics.h"
#include "audiomark/subprocess.h"
#include "audiomark/wav_io.h"
#include "json.hpp"

namespace audiomark {

using nlohmann::json;

std::string SchemeCommandFromEnv(const std::string& name) {
  std::string var = "AUDIOMARK_SCHEME_";
  for (char c : name) {
    var += std::isalnum(static_cast<unsigned char>(c))
               ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
               : '_';
  }
  const char* value = std::getenv(var.c_str());
  return value ? std::string(value) : std::string();
}

ExternalScheme::ExternalScheme(SchemeConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) config_.command = SchemeCommandFromEnv(config_.name);
  if (config_.command.empty()) {
    Fail(ErrorCode::kAdapterError,
         "no command configured for external scheme '" + config_.name + "'");
  }
  if (config_.external_family == DetectorFamily::kSyncBitwise) {
    Fail(ErrorCode::kInvalidArgument,
         "external schemes report bits or a probability, not a sync gate");
  }
}

std::string ExternalScheme::Call(const std::string& request) const {
  const ProcessResult result =
      RunShell(config_.command, request + "\n", config_.timeout);
  if (result.timed_out) {
    Fail(ErrorCode::kAdapterError,
         "scheme '" + config_.name + "' timed out after " +
             std::to_string(config_.timeout.count()) + " ms");
  }
  if (result.exit_code != 0) {
    Fail(ErrorCode::kAdapterError,
         "scheme '" + config_.name + "' exited with " +
             std::to_string(result.exit_code) + ": " + result.err.substr(0, 500));
  }
  return result.out;
}

namespace {

json ParseResponse(const std::string& text) {
  json response;
  try {
    response = json::parse(text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kProtocolError, "response is not JSON: " + text.substr(0, 200));
  }
  if (!response.is_object() || !response.contains("ok") ||
      !response["ok"].is_boolean()) {
    Fail(ErrorCode::kProtocolError, "response lacks a boolean 'ok'");
  }
  if (!response["ok"].get<bool>()) {
    std::string message = "adapter reported failure";
    if (response.contains("error") && response["error"].is_string()) {
      message = response["error"].get<std::string>();
    }
    Fail(ErrorCode::kAdapterError, message);
  }
  return response;
}

}  // namespace

Waveform ExternalScheme::Embed(const Waveform& signal,
                               const WatermarkBits& bits, double) const {
  TempDir dir;
  const auto in_path = dir.File("in.wav");
  const auto out_path = dir.File("out.wav");
  WriteWav(in_path, signal);
  const json request = {{"op", "embed"},
                        {"wav_path", in_path.string()},
                        {"out_path", out_path.string()},
                        {"bits", bits.ToString()}};
  ParseResponse(Call(request.dump()));
  Waveform out;
  try {
    out = ReadWav(out_path);
  } catch (const Error& e) {
    Fail(ErrorCode::kProtocolError,
         std::string("embed produced no readable output: ") + e.what());
  }
  if (out.sample_rate != signal.sample_rate) {
    out = Resample(out, signal.sample_rate);
  }
  out.samples.resize(signal.size(), 0.0);
  return out;
}

DetectionOutcome ExternalScheme::Decode(const Waveform& signal,
                                        const WatermarkBits& truth) const {
  TempDir dir;
  const auto in_path = dir.File("in.wav");
  WriteWav(in_path, signal);
  const json request = {{"op", "decode"}, {"wav_path", in_path.string()}};
  const json response = ParseResponse(Call(request.dump()));

  DetectionOutcome out;
  if (response.contains("bits")) {
    if (!response["bits"].is_string()) {
      Fail(ErrorCode::kProtocolError, "'bits' must be a string");
    }
    try {
      out.decoded = WatermarkBits::FromString(response["bits"].get<std::string>());
    } catch (const Error&) {
      Fail(ErrorCode::kProtocolError, "'bits' must contain only 0 and 1");
    }
    for (size_t i = 0; i < out.decoded.size(); ++i) {
      out.soft_bits.push_back(out.decoded[i]);
    }
  }
  if (response.contains("prob")) {
    if (!response["prob"].is_number()) {
      Fail(ErrorCode::kProtocolError, "'prob' must be a number");
    }
    out.probability = response["prob"].get<double>();
  }
  if (config_.external_family == DetectorFamily::kProbability) {
    if (!out.probability) {
      Fail(ErrorCode::kProtocolError, "probability detector returned no 'prob'");
    }
    out.score = *out.probability;
  } else {
    if (out.decoded.empty()) {
      Fail(ErrorCode::kProtocolError, "bitwise detector returned no 'bits'");
    }
    if (out.decoded.size() != truth.size()) {
      Fail(ErrorCode::kProtocolError,
           "decoded " + std::to_string(out.decoded.size()) +
               " bits, expected " + std::to_string(truth.size()));
    }
    out.score = BitwiseAccuracy(out.decoded, truth);
  }
  out.decision = Decide(config_.external_family, out, config_.threshold);
  return out;
}

}  // namespace audiomark
