// src/routing.cc

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

#include "spkback/routing.h"

#include <set>

#include "spkback/error.h"

namespace spkback {

namespace {

// Restricts the input lists to the ids a trial list actually uses.
std::vector<SpeakerGroup> UsedEnrolls(const std::vector<SpeakerGroup> &enrolls,
                                      const TrialList &trials) {
  std::set<std::string_view> used;
  for (const Trial &t : trials.entries) used.insert(t.enroll_id);
  std::vector<SpeakerGroup> out;
  for (const SpeakerGroup &g : enrolls)
    if (used.count(g.speaker_id)) out.push_back(g);
  return out;
}

std::vector<Embedding> UsedTests(const std::vector<Embedding> &tests,
                                 const TrialList &trials) {
  std::set<std::string_view> used;
  for (const Trial &t : trials.entries) used.insert(t.test_id);
  std::vector<Embedding> out;
  for (const Embedding &e : tests)
    if (used.count(e.id)) out.push_back(e);
  return out;
}

}  // namespace

ConditionPipeline MakeConditionPipeline(FourCovSystem system,
                                        const std::vector<SpeakerGroup> *enroll_cohort,
                                        const std::vector<Embedding> *test_cohort,
                                        std::optional<int> top_k,
                                        CalibrationModel calibration) {
  ConditionPipeline pipeline{std::move(system), std::nullopt, std::move(calibration)};
  if ((enroll_cohort == nullptr) != (test_cohort == nullptr))
    throw Error(ErrorKind::kParameter, "S-norm needs both an enrollment and a test cohort");
  if (enroll_cohort != nullptr) {
    CohortSet cohorts;
    cohorts.enroll_cohort = pipeline.system.PrepareEnrolls(*enroll_cohort);
    cohorts.test_cohort = pipeline.system.PrepareTests(*test_cohort);
    cohorts.top_k = top_k;
    cohorts.Validate();
    pipeline.cohorts = std::move(cohorts);
  }
  return pipeline;
}

std::map<std::string, TestLanguage> ParseLanguageMap(
    const std::map<std::string, std::string> &labels, const std::string &primary_label,
    const std::string &secondary_label) {
  std::map<std::string, TestLanguage> out;
  for (const auto &[id, label] : labels) {
    if (label == primary_label)
      out.emplace(id, TestLanguage::kPrimary);
    else if (label == secondary_label)
      out.emplace(id, TestLanguage::kSecondary);
    else
      throw Error(ErrorKind::kRouting, "test " + id + " has unknown language label '" +
                                           label + "' (expected " + primary_label + " or " +
                                           secondary_label + ")");
  }
  return out;
}

ConditionKey ClassifyTrial(const RoutingConfig &config, const std::string &enroll_id,
                           const std::string &test_id) {
  auto seg = config.enroll_segments.find(enroll_id);
  if (seg == config.enroll_segments.end())
    throw Error(ErrorKind::kRouting, "no segment count for enrollment " + enroll_id);
  auto lang = config.test_language.find(test_id);
  if (lang == config.test_language.end())
    throw Error(ErrorKind::kRouting, "no language for test " + test_id);
  ConditionKey key;
  key.enroll_bucket =
      seg->second < config.enroll_seg_threshold ? EnrollBucket::kFew : EnrollBucket::kMany;
  key.test_language = lang->second;
  return key;
}

TrialList ClassifyTrials(const RoutingConfig &config, const TrialList &trials) {
  TrialList out = trials;
  for (Trial &t : out.entries) t.condition = ClassifyTrial(config, t.enroll_id, t.test_id);
  return out;
}

ScoreSet ScoreCondition(const ConditionPipeline &pipeline,
                        const std::vector<SpeakerGroup> &enrolls,
                        const std::vector<Embedding> &tests, const TrialList &trials) {
  const FourCovSystem &sys = pipeline.system;
  std::vector<Embedding> e = sys.PrepareEnrolls(UsedEnrolls(enrolls, trials));
  std::vector<Embedding> t = sys.PrepareTests(UsedTests(tests, trials));
  ScoreSet scores = ScoreBatch(sys.kernel, e, t, trials);
  if (pipeline.cohorts) scores = SnormBatch(sys.kernel, *pipeline.cohorts, e, t, scores);
  return ApplyCalibration(pipeline.calibration, scores);
}

ScoreSet RouteAndScore(const RoutingConfig &config, const std::vector<SpeakerGroup> &enrolls,
                       const std::vector<Embedding> &tests, const TrialList &trials) {
  std::map<ConditionKey, TrialList> split;
  std::map<ConditionKey, std::vector<size_t>> positions;
  for (size_t i = 0; i < trials.Size(); ++i) {
    const Trial &t = trials.entries[i];
    ConditionKey key = t.condition ? *t.condition : ClassifyTrial(config, t.enroll_id, t.test_id);
    split[key].entries.push_back(t);
    positions[key].push_back(i);
  }
  std::string missing;
  for (const auto &[key, list] : split)
    if (!config.models.count(key)) missing += (missing.empty() ? "" : ", ") + ConditionName(key);
  if (!missing.empty())
    throw Error(ErrorKind::kRouting, "no model configured for condition(s): " + missing);

  ScoreSet out;
  out.entries.resize(trials.Size());
  for (const auto &[key, list] : split) {
    ScoreSet part = ScoreCondition(config.models.at(key), enrolls, tests, list);
    const std::vector<size_t> &pos = positions[key];
    for (size_t k = 0; k < pos.size(); ++k) out.entries[pos[k]] = std::move(part.entries[k]);
  }
  return out;
}

}  // namespace spkback
