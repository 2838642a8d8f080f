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

#ifndef AUDIOMARK_SUBPROCESS_H_
#define AUDIOMARK_SUBPROCESS_H_

#include <chrono>
#include <filesystem>
#include <string>

namespace audiomark {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

// Runs `command` through /bin/sh -c, feeding `input` on stdin. The whole
// process group is killed when the timeout expires.
ProcessResult RunShell(const std::string& command, const std::string& input,
                       std::chrono::milliseconds timeout);

// Single-quotes `text` for /bin/sh.
std::string ShellQuote(const std::string& text);

// Replaces every "{key}" occurrence in `text`.
std::string ReplaceAll(std::string text, const std::string& key,
                       const std::string& value);

// Uniquely named directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path File(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace audiomark

#endif  // AUDIOMARK_SUBPROCESS_H_
