// include/spkback/io.h

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

#ifndef SPKBACK_IO_H_
#define SPKBACK_IO_H_

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spkback/types.h"

namespace spkback {

// Text formats are whitespace separated, one record per line, '#' lines and
// blank lines ignored:
//   embeddings:  <id> <v1> ... <vd>
//   trials:      <enroll-id> <test-id> [tgt|non]
//   scores:      <enroll-id> <test-id> <score>
// The binary embedding format is
//   "SPKBEMB1" u32:dim { u32:id-length id-bytes f32[dim] }*
// with all integers and floats little-endian.

enum class EmbeddingFormat { kText, kBinary };

/// Reads either format (detected from the leading magic bytes).
std::vector<Embedding> ReadEmbeddings(const std::string &path);
std::vector<Embedding> ReadEmbeddingsText(std::istream &is,
                                          const std::string &source = "<stream>");
std::vector<Embedding> ReadEmbeddingsBinary(std::istream &is,
                                            const std::string &source = "<stream>");

void WriteEmbeddings(const std::string &path,
                     const std::vector<Embedding> &embeddings,
                     EmbeddingFormat format = EmbeddingFormat::kText);
void WriteEmbeddingsText(std::ostream &os,
                         const std::vector<Embedding> &embeddings);
void WriteEmbeddingsBinary(std::ostream &os,
                           const std::vector<Embedding> &embeddings);

TrialList ReadTrials(const std::string &path);
TrialList ReadTrials(std::istream &is, const std::string &source = "<stream>");
void WriteTrials(const std::string &path, const TrialList &trials);

ScoreSet ReadScores(const std::string &path);
ScoreSet ReadScores(std::istream &is, const std::string &source = "<stream>");
void WriteScores(const std::string &path, const ScoreSet &scores);
void WriteScores(std::ostream &os, const ScoreSet &scores);

/// Two-column text map, e.g. utt2spk or test_id -> language.
std::map<std::string, std::string> ReadStringMap(const std::string &path);
/// Two-column text map with an integer value (enroll_id -> n_segments).
std::map<std::string, int> ReadIntMap(const std::string &path);
/// spk2utt-style map: <key> <id1> <id2> ... ; order of ids is kept.
std::map<std::string, std::vector<std::string>> ReadListMap(
    const std::string &path);

void WriteStringMap(const std::string &path,
                    const std::map<std::string, std::string> &map);
void WriteIntMap(const std::string &path, const std::map<std::string, int> &map);
void WriteListMap(const std::string &path,
                  const std::map<std::string, std::vector<std::string>> &map);

/// Shortest decimal representation that parses back to the same double.
std::string FormatDouble(double value);
/// Strict parse of a whole token; returns false on junk or overflow.
bool ParseDouble(std::string_view token, double *value);

/// Writes via "<path>.tmp" and renames over the target once the writer has
/// finished and the stream is flushed. Throws an io error (with the path) on
/// failure; the target is never left half-written.
void WriteFileAtomically(const std::string &path,
                         const std::function<void(std::ostream &)> &writer,
                         bool binary = false);

}  // namespace spkback

#endif  // SPKBACK_IO_H_
