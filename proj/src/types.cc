// src/types.cc

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

#include "spkback/types.h"

#include <set>
#include <utility>

#include "spkback/error.h"

namespace spkback {

std::vector<ConditionKey> AllConditions() {
  return {{EnrollBucket::kFew, TestLanguage::kPrimary},
          {EnrollBucket::kFew, TestLanguage::kSecondary},
          {EnrollBucket::kMany, TestLanguage::kPrimary},
          {EnrollBucket::kMany, TestLanguage::kSecondary}};
}

std::string ConditionName(const ConditionKey &key) {
  std::string name = key.enroll_bucket == EnrollBucket::kFew ? "few" : "many";
  name += key.test_language == TestLanguage::kPrimary ? "-primary"
                                                      : "-secondary";
  return name;
}

std::optional<ConditionKey> ParseConditionName(std::string_view name) {
  for (const ConditionKey &key : AllConditions())
    if (ConditionName(key) == name) return key;
  return std::nullopt;
}

bool TrialList::HasLabels() const {
  for (const Trial &t : entries)
    if (t.label) return true;
  return false;
}

void TrialList::CheckUnique() const {
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const Trial &t : entries) {
    if (!seen.emplace(t.enroll_id, t.test_id).second)
      throw Error(ErrorKind::kParse, "duplicate trial (" + t.enroll_id + ", " +
                                         t.test_id + ")");
  }
}

std::vector<double> ScoreSet::Values() const {
  std::vector<double> values;
  values.reserve(entries.size());
  for (const ScoreEntry &e : entries) values.push_back(e.score);
  return values;
}

LabeledScores JoinLabels(const ScoreSet &scores, const TrialList &trials) {
  std::map<std::pair<std::string_view, std::string_view>, TrialLabel> labels;
  for (const Trial &t : trials.entries)
    if (t.label) labels.emplace(std::make_pair(std::string_view(t.enroll_id),
                                               std::string_view(t.test_id)),
                                *t.label);
  LabeledScores out;
  for (const ScoreEntry &e : scores.entries) {
    auto it = labels.find({e.enroll_id, e.test_id});
    if (it == labels.end()) continue;
    if (it->second == TrialLabel::kTarget)
      out.target.push_back(e.score);
    else
      out.nontarget.push_back(e.score);
  }
  return out;
}

std::string SpeakerIdFromPrefix(std::string_view id) {
  size_t pos = id.find('-');
  return std::string(pos == std::string_view::npos ? id : id.substr(0, pos));
}

namespace {

template <typename KeyFn>
std::vector<SpeakerGroup> GroupBy(const std::vector<Embedding> &embeddings,
                                  KeyFn key_of) {
  std::vector<SpeakerGroup> groups;
  std::map<std::string, size_t> index;
  for (const Embedding &e : embeddings) {
    std::string key = key_of(e);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back(SpeakerGroup{key, {}});
    SpeakerGroup &group = groups[it->second];
    if (!group.members.empty() && group.Dim() != e.Dim())
      throw Error(ErrorKind::kDimension,
                  "speaker " + key + ": member dimension " +
                      std::to_string(e.Dim()) + " differs from " +
                      std::to_string(group.Dim()));
    group.members.push_back(e);
  }
  return groups;
}

}  // namespace

std::vector<SpeakerGroup> GroupBySpeakerPrefix(
    const std::vector<Embedding> &embeddings) {
  return GroupBy(embeddings,
                 [](const Embedding &e) { return SpeakerIdFromPrefix(e.id); });
}

std::vector<SpeakerGroup> GroupBySpeakerMap(
    const std::vector<Embedding> &embeddings,
    const std::map<std::string, std::string> &utt2spk) {
  return GroupBy(embeddings, [&](const Embedding &e) {
    auto it = utt2spk.find(e.id);
    if (it == utt2spk.end())
      throw Error(ErrorKind::kLookup, "no speaker for utterance " + e.id);
    return it->second;
  });
}

std::map<std::string, size_t> IndexById(const std::vector<Embedding> &list) {
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < list.size(); ++i)
    if (!index.emplace(list[i].id, i).second)
      throw Error(ErrorKind::kParse, "duplicate embedding id " + list[i].id);
  return index;
}

}  // namespace spkback
