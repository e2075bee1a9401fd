// src/error.cc

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

#include "spkback/error.h"

#include <atomic>
#include <iostream>

namespace spkback {

namespace {
std::atomic<bool> g_warnings_enabled{true};
}

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "io";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kRouting: return "routing";
    case ErrorKind::kMetric: return "metric";
  }
  return "unknown";
}

void Warn(const std::string &message) {
  if (g_warnings_enabled.load(std::memory_order_relaxed))
    std::cerr << "WARNING: " << message << '\n';
}

void SetWarningsEnabled(bool enabled) {
  g_warnings_enabled.store(enabled, std::memory_order_relaxed);
}

}  // namespace spkback
