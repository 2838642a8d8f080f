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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "audiomark/errors.h"

namespace audiomark {
namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint32_t ReadU32(const std::string& b, size_t pos) {
  return static_cast<uint32_t>(static_cast<uint8_t>(b[pos])) |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 1])) << 8 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 2])) << 16 |
         static_cast<uint32_t>(static_cast<uint8_t>(b[pos + 3])) << 24;
}

uint16_t ReadU16(const std::string& b, size_t pos) {
  return static_cast<uint16_t>(static_cast<uint8_t>(b[pos]) |
                               static_cast<uint8_t>(b[pos + 1]) << 8);
}

void PutU32(std::string& b, uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string& b, uint16_t v) {
  b.push_back(static_cast<char>(v & 0xff));
  b.push_back(static_cast<char>((v >> 8) & 0xff));
}

double DecodeSample(const std::string& b, size_t pos, int bits) {
  switch (bits) {
    case 8:
      return (static_cast<uint8_t>(b[pos]) - 128) / 128.0;
    case 16:
      return static_cast<int16_t>(ReadU16(b, pos)) / 32768.0;
    case 24: {
      int32_t v = static_cast<int32_t>(static_cast<uint8_t>(b[pos])) |
                  static_cast<int32_t>(static_cast<uint8_t>(b[pos + 1])) << 8 |
                  static_cast<int32_t>(static_cast<int8_t>(b[pos + 2])) << 16;
      return v / 8388608.0;
    }
    case 32:
      return static_cast<int32_t>(ReadU32(b, pos)) / 2147483648.0;
  }
  return 0.0;
}

}  // namespace

Waveform ParseWav(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "RIFF") != 0 ||
      bytes.compare(8, 4, "WAVE") != 0) {
    Fail(ErrorCode::kFormatError, "missing RIFF/WAVE header");
  }
  bool have_format = false;
  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string id = bytes.substr(pos, 4);
    const uint32_t size = ReadU32(bytes, pos + 4);
    const size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + size > bytes.size()) {
        Fail(ErrorCode::kFormatError, "truncated fmt chunk");
      }
      format = ReadU16(bytes, body);
      channels = ReadU16(bytes, body + 2);
      rate = ReadU32(bytes, body + 4);
      bits = ReadU16(bytes, body + 14);
      if (format == kFormatExtensible) {
        if (size < 40) Fail(ErrorCode::kFormatError, "truncated extensible fmt");
        format = ReadU16(bytes, body + 24);
      }
      have_format = true;
    } else if (id == "data") {
      if (!have_format) Fail(ErrorCode::kFormatError, "data before fmt chunk");
      if (format != kFormatPcm) {
        Fail(ErrorCode::kUnsupportedEncoding,
             "only integer PCM is supported, format tag " +
                 std::to_string(format));
      }
      if (bits != 8 && bits != 16 && bits != 24 && bits != 32) {
        Fail(ErrorCode::kUnsupportedEncoding,
             "unsupported PCM bit depth " + std::to_string(bits));
      }
      if (channels == 0 || rate == 0) {
        Fail(ErrorCode::kFormatError, "zero channels or sample rate");
      }
      const size_t available = std::min<size_t>(size, bytes.size() - body);
      const size_t frame_bytes = static_cast<size_t>(channels) * (bits / 8);
      const size_t frames = available / frame_bytes;
      Waveform out;
      out.sample_rate = static_cast<int>(rate);
      out.samples.resize(frames);
      for (size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
          acc += DecodeSample(bytes, body + i * frame_bytes + c * (bits / 8),
                              bits);
        }
        out.samples[i] = acc / channels;
      }
      return out;
    }
    pos = body + size + (size & 1);
  }
  Fail(ErrorCode::kFormatError, "no data chunk");
}

Waveform ReadWav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  try {
    return ParseWav(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

std::string EncodeWav(const Waveform& signal) {
  if (signal.sample_rate <= 0) {
    Fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  const uint32_t data_bytes = static_cast<uint32_t>(signal.samples.size() * 2);
  std::string b;
  b.reserve(44 + data_bytes);
  b += "RIFF";
  PutU32(b, 36 + data_bytes);
  b += "WAVEfmt ";
  PutU32(b, 16);
  PutU16(b, kFormatPcm);
  PutU16(b, 1);
  PutU32(b, static_cast<uint32_t>(signal.sample_rate));
  PutU32(b, static_cast<uint32_t>(signal.sample_rate) * 2);
  PutU16(b, 2);
  PutU16(b, 16);
  b += "data";
  PutU32(b, data_bytes);
  for (double v : signal.samples) {
    double q = std::round(std::clamp(v, -1.0, 1.0) * 32768.0);
    q = std::clamp(q, -32768.0, 32767.0);
    PutU16(b, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  return b;
}

void WriteWav(const std::filesystem::path& path, const Waveform& signal) {
  const std::string bytes = EncodeWav(signal);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace audiomark
