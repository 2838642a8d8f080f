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

#ifndef AUDIOMARK_PARALLEL_H_
#define AUDIOMARK_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace audiomark {

// AUDIOMARK_THREADS when set to a positive integer, else the hardware
// concurrency (at least 1).
size_t DefaultThreadCount();

// Calls fn(i) for every i in [0, n) on up to `threads` worker threads
// (0 = DefaultThreadCount()). Results must be written by index; the call
// order is unspecified. After a throw no new indices start; the exception
// from the lowest failing index is rethrown once the workers stop.
void ParallelFor(size_t n, size_t threads,
                 const std::function<void(size_t)>& fn);

}  // namespace audiomark

#endif  // AUDIOMARK_PARALLEL_H_
