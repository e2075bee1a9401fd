// src/parallel.cc

// Copyright 2026  The spkback Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "spkback/parallel.h"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include <omp.h>

namespace spkback {

namespace {

int InitialThreads() {
  int n = ThreadsFromEnvironment();
  return n > 0 ? n : omp_get_max_threads();
}

std::atomic<int> &ThreadCount() {
  static std::atomic<int> count{InitialThreads()};
  return count;
}

}  // namespace

int ThreadsFromEnvironment() {
  const char *value = std::getenv(kThreadsEnvVar);
  if (value == nullptr) return 0;
  int n = 0;
  auto r = std::from_chars(value, value + std::strlen(value), n);
  if (r.ec != std::errc() || n <= 0) return 0;
  return n;
}

int NumThreads() { return ThreadCount().load(std::memory_order_relaxed); }

void SetNumThreads(int n) {
  ThreadCount().store(n > 0 ? n : 1, std::memory_order_relaxed);
}

}  // namespace spkback
