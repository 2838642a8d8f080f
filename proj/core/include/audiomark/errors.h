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

#ifndef AUDIOMARK_ERRORS_H_
#define AUDIOMARK_ERRORS_H_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace audiomark {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidOverlap,
  kSignalTooShort,
  kFormatError,
  kUnsupportedEncoding,
  kIoError,
  kShapeError,
  kUndefinedSnr,
  kUndefinedRate,
  kDegenerateVariance,
  kGradientUnavailable,
  kCalibrationInfeasible,
  kAdapterError,
  kProtocolError,
  kRangeError,
  kTemplateError,
  kCodecUnavailable,
  kCodecError,
  kInitializationFailed,
  kOracleError,
  kEmptyReport,
  kManifestError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type. Pipeline
// failures additionally carry the index of the stage that failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, int stage);

  ErrorCode code() const { return code_; }
  // The message without the error-code prefix.
  const std::string& message() const { return message_; }
  std::optional<int> stage() const { return stage_; }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<int> stage_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

}  // namespace audiomark

#endif  // AUDIOMARK_ERRORS_H_
