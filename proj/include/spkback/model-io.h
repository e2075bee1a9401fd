// include/spkback/model-io.h

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

#ifndef SPKBACK_MODEL_IO_H_
#define SPKBACK_MODEL_IO_H_

#include <string>

#include "spkback/plda.h"
#include "spkback/system.h"

namespace spkback {

// Binary model files. Each starts with an 8-byte magic and a u32 version,
// followed by u32 dimensions and little-endian doubles (matrices column-major).

/// A PLDA model together with the preprocessing chain its data went through.
struct PldaBundle {
  Preprocessor pre;
  PldaModel model;
};

void WritePreprocessor(const std::string &path, const Preprocessor &pre);
Preprocessor ReadPreprocessor(const std::string &path);

void WritePldaBundle(const std::string &path, const PldaBundle &bundle);
PldaBundle ReadPldaBundle(const std::string &path);

/// Both sides' chains and models plus the coupling. The kernel is rebuilt on
/// read.
void WriteFourCovSystem(const std::string &path, const FourCovSystem &system);
FourCovSystem ReadFourCovSystem(const std::string &path);

}  // namespace spkback

#endif  // SPKBACK_MODEL_IO_H_
