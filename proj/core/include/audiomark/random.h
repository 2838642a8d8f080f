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

#ifndef AUDIOMARK_RANDOM_H_
#define AUDIOMARK_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace audiomark {

struct Seed {
  uint64_t value = 0;

  bool operator==(const Seed&) const = default;
};

// Stable 64-bit FNV-1a hash, used for module tags.
uint64_t StableHash(std::string_view text);

// Derives a module seed: the run seed XOR the stable hash of the module tag.
Seed DeriveSeed(Seed seed, std::string_view tag);
// Derives a per-item seed (clip index, condition index, ...).
Seed DeriveSeed(Seed seed, uint64_t index);

// Deterministic generator. The distributions are implemented here rather than
// taken from <random> so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, n).
  uint64_t UniformIndex(uint64_t n);
  double Gaussian();
  std::vector<double> GaussianVector(size_t n);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[UniformIndex(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace audiomark

#endif  // AUDIOMARK_RANDOM_H_
