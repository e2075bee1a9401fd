// spkback/error.h

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

#ifndef SPKBACK_ERROR_H_
#define SPKBACK_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace spkback {

/// Error categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  kIo,           // file missing, unreadable or unwritable
  kParse,        // malformed record in an input file
  kDimension,    // vectors or matrices of incompatible size
  kNumerical,    // singular / non-PD matrix, non-convergence
  kParameter,    // argument outside its domain (rank > dim, alpha > 1, ...)
  kDomain,       // mathematically undefined input (zero vector, empty sample)
  kLookup,       // id referenced by a trial is not present
  kRouting,      // missing trial metadata or condition model
  kMetric,       // metric undefined for the input (single class)
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Non-fatal diagnostics (e.g. covariance floor engaged). Goes to stderr
/// unless silenced; tests silence it.
void Warn(const std::string &message);
void SetWarningsEnabled(bool enabled);

}  // namespace spkback

#endif  // SPKBACK_ERROR_H_
