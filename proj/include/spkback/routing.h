// include/spkback/routing.h

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

#ifndef SPKBACK_ROUTING_H_
#define SPKBACK_ROUTING_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spkback/calibration.h"
#include "spkback/scorenorm.h"
#include "spkback/system.h"
#include "spkback/types.h"

namespace spkback {

/// Everything needed to score one condition: back-end, optional cohorts,
/// calibration. Cohorts are stored prepared for this condition's sides.
struct ConditionPipeline {
  FourCovSystem system;
  std::optional<CohortSet> cohorts;
  CalibrationModel calibration;
};

/// Builds a pipeline, preparing raw cohorts with the system's chains. Each
/// enrollment-cohort group becomes one L-averaged pseudo-model.
ConditionPipeline MakeConditionPipeline(FourCovSystem system,
                                        const std::vector<SpeakerGroup> *enroll_cohort,
                                        const std::vector<Embedding> *test_cohort,
                                        std::optional<int> top_k,
                                        CalibrationModel calibration = {});

struct RoutingConfig {
  std::map<ConditionKey, ConditionPipeline> models;
  int enroll_seg_threshold = 5;
  std::map<std::string, int> enroll_segments;
  std::map<std::string, TestLanguage> test_language;
};

/// Maps language labels of a metadata file onto the two test languages.
/// Unknown labels are a routing error.
std::map<std::string, TestLanguage> ParseLanguageMap(
    const std::map<std::string, std::string> &labels, const std::string &primary_label,
    const std::string &secondary_label);

/// few iff the enrollment has fewer than enroll_seg_threshold segments.
ConditionKey ClassifyTrial(const RoutingConfig &config, const std::string &enroll_id,
                           const std::string &test_id);

/// Tags every trial with its condition.
TrialList ClassifyTrials(const RoutingConfig &config, const TrialList &trials);

/// Raw score -> optional S-norm -> calibration for one condition.
ScoreSet ScoreCondition(const ConditionPipeline &pipeline,
                        const std::vector<SpeakerGroup> &enrolls,
                        const std::vector<Embedding> &tests, const TrialList &trials);

/// Classifies every trial, runs each condition's pipeline on its share of
/// the trials and merges the results back into input order.
ScoreSet RouteAndScore(const RoutingConfig &config, const std::vector<SpeakerGroup> &enrolls,
                       const std::vector<Embedding> &tests, const TrialList &trials);

}  // namespace spkback

#endif  // SPKBACK_ROUTING_H_
