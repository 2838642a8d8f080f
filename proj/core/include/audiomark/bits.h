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

#ifndef AUDIOMARK_BITS_H_
#define AUDIOMARK_BITS_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "audiomark/random.h"

namespace audiomark {

class WatermarkBits {
 public:
  WatermarkBits() = default;
  explicit WatermarkBits(std::vector<uint8_t> bits);

  // Parses a string of '0' and '1'. Throws InvalidArgument otherwise.
  static WatermarkBits FromString(std::string_view text);
  static WatermarkBits Random(size_t n, Rng& rng);

  size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  uint8_t operator[](size_t i) const { return bits_[i]; }
  const std::vector<uint8_t>& bits() const { return bits_; }

  WatermarkBits Complement() const;
  WatermarkBits Concat(const WatermarkBits& tail) const;
  WatermarkBits Slice(size_t begin, size_t count) const;
  std::string ToString() const;

  bool operator==(const WatermarkBits&) const = default;

 private:
  std::vector<uint8_t> bits_;
};

}  // namespace audiomark

#endif  // AUDIOMARK_BITS_H_
