// tests/test_util.h

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

#ifndef SPKBACK_TESTS_TEST_UTIL_H_
#define SPKBACK_TESTS_TEST_UTIL_H_

#include <functional>

#include "doctest.h"
#include "spkback/error.h"

namespace spkback {

// True when `fn` throws spkback::Error of the given kind.
inline bool ThrowsKind(ErrorKind kind, const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace spkback

#endif  // SPKBACK_TESTS_TEST_UTIL_H_
