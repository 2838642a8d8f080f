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

#include "audiomark/bits.h"

#include "audiomark/errors.h"

namespace audiomark {

WatermarkBits::WatermarkBits(std::vector<uint8_t> bits) : bits_(std::move(bits)) {
  for (uint8_t& b : bits_) b = b ? 1 : 0;
}

WatermarkBits WatermarkBits::FromString(std::string_view text) {
  std::vector<uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      Fail(ErrorCode::kInvalidArgument,
           "watermark bits must be a string of 0 and 1, got '" +
               std::string(text) + "'");
    }
    bits.push_back(c == '1');
  }
  return WatermarkBits(std::move(bits));
}

WatermarkBits WatermarkBits::Random(size_t n, Rng& rng) {
  std::vector<uint8_t> bits(n);
  for (auto& b : bits) b = static_cast<uint8_t>(rng.NextU64() >> 63);
  return WatermarkBits(std::move(bits));
}

WatermarkBits WatermarkBits::Complement() const {
  std::vector<uint8_t> bits(bits_.size());
  for (size_t i = 0; i < bits.size(); ++i) bits[i] = 1 - bits_[i];
  return WatermarkBits(std::move(bits));
}

WatermarkBits WatermarkBits::Concat(const WatermarkBits& tail) const {
  std::vector<uint8_t> bits = bits_;
  bits.insert(bits.end(), tail.bits_.begin(), tail.bits_.end());
  return WatermarkBits(std::move(bits));
}

WatermarkBits WatermarkBits::Slice(size_t begin, size_t count) const {
  if (begin + count > bits_.size()) {
    Fail(ErrorCode::kShapeError, "bit slice out of range");
  }
  return WatermarkBits(std::vector<uint8_t>(bits_.begin() + begin,
                                            bits_.begin() + begin + count));
}

std::string WatermarkBits::ToString() const {
  std::string out;
  out.reserve(bits_.size());
  for (uint8_t b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

}  // namespace audiomark
