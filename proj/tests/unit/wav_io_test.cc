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

#include "audiomark/wav_io.h"

#include <cmath>
#include <cstdint>
#include <string>

#include "audiomark/errors.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiomark {
namespace {

void PutLe(std::string& out, uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

// Hand-built 16-bit PCM file with interleaved channels.
std::string PcmWav(const std::vector<std::vector<int16_t>>& channels,
                   uint32_t rate, uint16_t format = 1) {
  const uint16_t n_ch = static_cast<uint16_t>(channels.size());
  const uint32_t frames = channels[0].size();
  const uint32_t data_bytes = frames * n_ch * 2;
  std::string out = "RIFF";
  PutLe(out, 36 + data_bytes, 4);
  out += "WAVEfmt ";
  PutLe(out, 16, 4);
  PutLe(out, format, 2);
  PutLe(out, n_ch, 2);
  PutLe(out, rate, 4);
  PutLe(out, rate * n_ch * 2, 4);
  PutLe(out, n_ch * 2, 2);
  PutLe(out, 16, 2);
  out += "data";
  PutLe(out, data_bytes, 4);
  for (uint32_t f = 0; f < frames; ++f) {
    for (const auto& ch : channels) PutLe(out, static_cast<uint16_t>(ch[f]), 2);
  }
  return out;
}

TEST(WavIoTest, SineRoundTripWithinQuantizationStep) {
  const Waveform sine = testing::Sine(440.0, 1.0, 0.9);
  const auto path = testing::ScratchDir("wav") / "sine.wav";
  WriteWav(path, sine);
  const Waveform back = ReadWav(path);
  ASSERT_EQ(back.size(), sine.size());
  EXPECT_EQ(back.sample_rate, 16000);
  for (size_t i = 0; i < sine.size(); ++i) {
    EXPECT_LE(std::abs(back.samples[i] - sine.samples[i]), std::ldexp(1.0, -15));
  }
}

TEST(WavIoTest, StereoOppositeChannelsDownmixToSilence) {
  std::vector<int16_t> left = {1000, -2000, 32767, -32767, 5};
  std::vector<int16_t> right;
  for (int16_t v : left) right.push_back(static_cast<int16_t>(-v));
  const Waveform w = ParseWav(PcmWav({left, right}, 16000));
  ASSERT_EQ(w.size(), left.size());
  for (double x : w.samples) EXPECT_EQ(x, 0.0);
}

TEST(WavIoTest, KeepsNativeRate) {
  const Waveform w = ParseWav(PcmWav({{1, 2, 3, 4}}, 8000));
  EXPECT_EQ(w.sample_rate, 8000);
  EXPECT_EQ(w.size(), 4u);
}

TEST(WavIoTest, RejectsMalformedAndNonPcm) {
  try {
    ParseWav("not a wav file at all");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormatError);
  }
  try {
    ParseWav(PcmWav({{1, 2}}, 16000, /*format=*/3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupportedEncoding);
  }
}

TEST(WavIoTest, EncodeIsDeterministic) {
  const Waveform w = testing::WhiteNoise(500, 4);
  EXPECT_EQ(EncodeWav(w), EncodeWav(w));
  EXPECT_EQ(EncodeWav(ParseWav(EncodeWav(w))), EncodeWav(w));
}

}  // namespace
}  // namespace audiomark
