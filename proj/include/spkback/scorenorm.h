// include/spkback/scorenorm.h

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

#ifndef SPKBACK_SCORENORM_H_
#define SPKBACK_SCORENORM_H_

#include <optional>
#include <span>
#include <vector>

#include "spkback/fourcov.h"
#include "spkback/types.h"

namespace spkback {

inline constexpr int kDefaultTopK = 400;

/// Side-specific impostor cohorts, prepared for their side. The enrollment
/// cohort only ever fills the enrollment slot of the kernel and the test
/// cohort the test slot.
struct CohortSet {
  std::vector<Embedding> enroll_cohort;
  std::vector<Embedding> test_cohort;
  /// Number of highest cohort scores kept per side; nullopt keeps all.
  std::optional<int> top_k = kDefaultTopK;

  void Validate() const;
};

struct CohortStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean and population standard deviation of the top_k largest scores. All
/// scores tied with the k-th largest are kept, so the selection does not
/// depend on input order. top_k larger than the set keeps everything.
CohortStats TopKStats(std::span<const double> scores, std::optional<int> top_k);

/// Combination step given both cohort statistics:
///   1/2 (raw - mu_e) / sigma_e + 1/2 (raw - mu_t) / sigma_t
/// where the _e statistics come from s(w_e, test cohort) and the _t ones
/// from s(enroll cohort, w_t).
double SnormFromStats(double raw, const CohortStats &enroll_stats,
                      const CohortStats &test_stats);

/// Asymmetric S-norm of one trial; raw must be ScoreTrial(kernel, w_e, w_t).
double Snorm(const ScoringKernel &kernel, const CohortSet &cohorts, const Vector &w_e,
             const Vector &w_t, double raw);

/// Normalizes a ScoreSet. Cohort statistics are computed once per distinct
/// enrollment and test vector, in parallel, then applied per trial.
ScoreSet SnormBatch(const ScoringKernel &kernel, const CohortSet &cohorts,
                    const std::vector<Embedding> &enrolls,
                    const std::vector<Embedding> &tests, const ScoreSet &scores);
/// Per-trial Snorm() loop with no caching.
ScoreSet SnormBatchReference(const ScoringKernel &kernel, const CohortSet &cohorts,
                             const std::vector<Embedding> &enrolls,
                             const std::vector<Embedding> &tests, const ScoreSet &scores);

}  // namespace spkback

#endif  // SPKBACK_SCORENORM_H_
