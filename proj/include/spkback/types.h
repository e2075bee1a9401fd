// include/spkback/types.h

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

#ifndef SPKBACK_TYPES_H_
#define SPKBACK_TYPES_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace spkback {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A fixed-dimension embedding (x-vector or similar) with its utterance id.
struct Embedding {
  std::string id;
  Vector vector;

  Eigen::Index Dim() const { return vector.size(); }
};

/// All embeddings of one speaker, in input order.
struct SpeakerGroup {
  std::string speaker_id;
  std::vector<Embedding> members;

  Eigen::Index Dim() const {
    return members.empty() ? 0 : members.front().Dim();
  }
  int Size() const { return static_cast<int>(members.size()); }
};

enum class TrialLabel { kTarget, kNontarget };

enum class EnrollBucket { kFew, kMany };
enum class TestLanguage { kPrimary, kSecondary };

/// One cell of the 2x2 trial-condition grid (enrollment size x test
/// language).
struct ConditionKey {
  EnrollBucket enroll_bucket = EnrollBucket::kFew;
  TestLanguage test_language = TestLanguage::kPrimary;

  auto operator<=>(const ConditionKey &) const = default;
};

/// The four conditions in a fixed order.
std::vector<ConditionKey> AllConditions();
/// "few-primary", "many-secondary", ...
std::string ConditionName(const ConditionKey &key);
std::optional<ConditionKey> ParseConditionName(std::string_view name);

struct Trial {
  std::string enroll_id;
  std::string test_id;
  std::optional<TrialLabel> label;
  std::optional<ConditionKey> condition;
};

struct TrialList {
  std::vector<Trial> entries;

  size_t Size() const { return entries.size(); }
  bool HasLabels() const;
  /// Throws a parse error if an (enroll_id, test_id) pair repeats.
  void CheckUnique() const;
};

struct ScoreEntry {
  std::string enroll_id;
  std::string test_id;
  double score = 0.0;
};

struct ScoreSet {
  std::vector<ScoreEntry> entries;

  size_t Size() const { return entries.size(); }
  std::vector<double> Values() const;
};

/// Scores split by class; the input every metric works on.
struct LabeledScores {
  std::vector<double> target;
  std::vector<double> nontarget;
};

/// Joins scores with trial labels on (enroll_id, test_id). Trials without a
/// label and scores without a matching trial are skipped.
LabeledScores JoinLabels(const ScoreSet &scores, const TrialList &trials);

/// Speaker id convention for synthetic data: the id prefix before the first
/// '-'. An id without '-' is its own speaker.
std::string SpeakerIdFromPrefix(std::string_view id);

/// Partitions embeddings by speaker prefix. Groups appear in order of the
/// first occurrence of each speaker, members keep input order.
std::vector<SpeakerGroup> GroupBySpeakerPrefix(
    const std::vector<Embedding> &embeddings);

/// Same, with an explicit utterance->speaker map. Unmapped ids are an error.
std::vector<SpeakerGroup> GroupBySpeakerMap(
    const std::vector<Embedding> &embeddings,
    const std::map<std::string, std::string> &utt2spk);

/// Builds the id -> index lookup used by the batch scorers. Duplicate ids
/// raise a parse error.
std::map<std::string, size_t> IndexById(const std::vector<Embedding> &list);

}  // namespace spkback

#endif  // SPKBACK_TYPES_H_
