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

#include "audiomark/errors.h"

namespace audiomark {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidOverlap: return "InvalidOverlap";
    case ErrorCode::kSignalTooShort: return "SignalTooShort";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kUndefinedSnr: return "UndefinedSnr";
    case ErrorCode::kUndefinedRate: return "UndefinedRate";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
    case ErrorCode::kGradientUnavailable: return "GradientUnavailable";
    case ErrorCode::kCalibrationInfeasible: return "CalibrationInfeasible";
    case ErrorCode::kAdapterError: return "AdapterError";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kRangeError: return "RangeError";
    case ErrorCode::kTemplateError: return "TemplateError";
    case ErrorCode::kCodecUnavailable: return "CodecUnavailable";
    case ErrorCode::kCodecError: return "CodecError";
    case ErrorCode::kInitializationFailed: return "InitializationFailed";
    case ErrorCode::kOracleError: return "OracleError";
    case ErrorCode::kEmptyReport: return "EmptyReport";
    case ErrorCode::kManifestError: return "ManifestError";
  }
  return "Unknown";
}

namespace {

std::string Format(ErrorCode code, const std::string& message) {
  std::string out(ErrorCodeName(code));
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(Format(code, message)),
      code_(code),
      message_(message) {}

Error::Error(ErrorCode code, const std::string& message, int stage)
    : std::runtime_error(Format(code, message + " (stage " +
                                          std::to_string(stage) + ")")),
      code_(code),
      message_(message),
      stage_(stage) {}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace audiomark
