// include/spkback/parallel.h

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

#ifndef SPKBACK_PARALLEL_H_
#define SPKBACK_PARALLEL_H_

namespace spkback {

/// Environment variable read for the default worker count.
inline constexpr const char *kThreadsEnvVar = "SPKBACK_NUM_THREADS";

/// Worker count used by the OpenMP kernels. Defaults to $SPKBACK_NUM_THREADS
/// when set, otherwise the OpenMP default.
int NumThreads();
void SetNumThreads(int n);

/// Reads kThreadsEnvVar; returns 0 if unset or invalid.
int ThreadsFromEnvironment();

/// Restores the previous thread count on scope exit (tests, benchmarks).
class ScopedNumThreads {
 public:
  explicit ScopedNumThreads(int n) : previous_(NumThreads()) { SetNumThreads(n); }
  ~ScopedNumThreads() { SetNumThreads(previous_); }
  ScopedNumThreads(const ScopedNumThreads &) = delete;
  ScopedNumThreads &operator=(const ScopedNumThreads &) = delete;

 private:
  int previous_;
};

}  // namespace spkback

#endif  // SPKBACK_PARALLEL_H_
