// src/scorenorm.cc

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

#include "spkback/scorenorm.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <omp.h>

#include "spkback/error.h"
#include "spkback/parallel.h"

namespace spkback {

namespace {

// Stats over a scratch copy; `values` is reordered.
CohortStats TopKStatsInPlace(std::vector<double> &values, std::optional<int> top_k) {
  size_t keep = values.size();
  if (top_k && static_cast<size_t>(*top_k) < values.size()) {
    auto kth = values.begin() + (*top_k - 1);
    std::nth_element(values.begin(), kth, values.end(), std::greater<double>());
    const double threshold = *kth;
    auto end = std::partition(values.begin(), values.end(),
                              [threshold](double v) { return v >= threshold; });
    keep = static_cast<size_t>(end - values.begin());
    // Partition order depends on the nth_element permutation; sort the kept
    // prefix so sums are taken in a canonical order.
    std::sort(values.begin(), end);
  } else {
    std::sort(values.begin(), values.end());
  }
  double sum = 0.0;
  for (size_t i = 0; i < keep; ++i) sum += values[i];
  CohortStats stats;
  stats.mean = sum / static_cast<double>(keep);
  double sq = 0.0;
  for (size_t i = 0; i < keep; ++i) {
    double dev = values[i] - stats.mean;
    sq += dev * dev;
  }
  stats.stddev = std::sqrt(sq / static_cast<double>(keep));
  return stats;
}

std::vector<double> EnrollAgainstTestCohort(const ScoringKernel &kernel,
                                            const CohortSet &cohorts, const Vector &w_e) {
  std::vector<double> scores;
  scores.reserve(cohorts.test_cohort.size());
  for (const Embedding &t : cohorts.test_cohort)
    scores.push_back(ScoreTrial(kernel, w_e, t.vector));
  return scores;
}

std::vector<double> EnrollCohortAgainstTest(const ScoringKernel &kernel,
                                            const CohortSet &cohorts, const Vector &w_t) {
  std::vector<double> scores;
  scores.reserve(cohorts.enroll_cohort.size());
  for (const Embedding &e : cohorts.enroll_cohort)
    scores.push_back(ScoreTrial(kernel, e.vector, w_t));
  return scores;
}

void CheckSigma(const CohortStats &stats, const char *which, const std::string &id) {
  if (!(stats.stddev > 0.0))
    throw Error(ErrorKind::kNumerical, std::string("S-norm: ") + which +
                                           " cohort scores have zero spread for " + id);
}

}  // namespace

void CohortSet::Validate() const {
  if (enroll_cohort.empty()) throw Error(ErrorKind::kDomain, "empty enrollment cohort");
  if (test_cohort.empty()) throw Error(ErrorKind::kDomain, "empty test cohort");
  if (top_k && *top_k < 1) throw Error(ErrorKind::kParameter, "top-k must be positive");
}

CohortStats TopKStats(std::span<const double> scores, std::optional<int> top_k) {
  if (scores.empty()) throw Error(ErrorKind::kDomain, "no cohort scores");
  if (top_k && *top_k < 1) throw Error(ErrorKind::kParameter, "top-k must be positive");
  std::vector<double> values(scores.begin(), scores.end());
  return TopKStatsInPlace(values, top_k);
}

double SnormFromStats(double raw, const CohortStats &enroll_stats,
                      const CohortStats &test_stats) {
  CheckSigma(enroll_stats, "test-cohort (enrollment side)", "trial");
  CheckSigma(test_stats, "enrollment-cohort (test side)", "trial");
  return 0.5 * (raw - enroll_stats.mean) / enroll_stats.stddev +
         0.5 * (raw - test_stats.mean) / test_stats.stddev;
}

double Snorm(const ScoringKernel &kernel, const CohortSet &cohorts, const Vector &w_e,
             const Vector &w_t, double raw) {
  cohorts.Validate();
  std::vector<double> e_scores = EnrollAgainstTestCohort(kernel, cohorts, w_e);
  std::vector<double> t_scores = EnrollCohortAgainstTest(kernel, cohorts, w_t);
  return SnormFromStats(raw, TopKStatsInPlace(e_scores, cohorts.top_k),
                        TopKStatsInPlace(t_scores, cohorts.top_k));
}

ScoreSet SnormBatchReference(const ScoringKernel &kernel, const CohortSet &cohorts,
                             const std::vector<Embedding> &enrolls,
                             const std::vector<Embedding> &tests, const ScoreSet &scores) {
  auto enroll_index = IndexById(enrolls), test_index = IndexById(tests);
  ScoreSet out;
  out.entries.reserve(scores.Size());
  for (const ScoreEntry &s : scores.entries) {
    auto ei = enroll_index.find(s.enroll_id);
    if (ei == enroll_index.end())
      throw Error(ErrorKind::kLookup, "unknown enrollment id " + s.enroll_id);
    auto ti = test_index.find(s.test_id);
    if (ti == test_index.end()) throw Error(ErrorKind::kLookup, "unknown test id " + s.test_id);
    out.entries.push_back({s.enroll_id, s.test_id,
                           Snorm(kernel, cohorts, enrolls[ei->second].vector,
                                 tests[ti->second].vector, s.score)});
  }
  return out;
}

ScoreSet SnormBatch(const ScoringKernel &kernel, const CohortSet &cohorts,
                    const std::vector<Embedding> &enrolls,
                    const std::vector<Embedding> &tests, const ScoreSet &scores) {
  cohorts.Validate();
  auto enroll_index = IndexById(enrolls), test_index = IndexById(tests);

  // Distinct vectors referenced by the score set, in first-use order.
  std::map<size_t, size_t> enroll_slot, test_slot;
  std::vector<Embedding> used_enrolls, used_tests;
  std::vector<std::pair<size_t, size_t>> slots;
  slots.reserve(scores.Size());
  for (const ScoreEntry &s : scores.entries) {
    auto ei = enroll_index.find(s.enroll_id);
    if (ei == enroll_index.end())
      throw Error(ErrorKind::kLookup, "unknown enrollment id " + s.enroll_id);
    auto ti = test_index.find(s.test_id);
    if (ti == test_index.end()) throw Error(ErrorKind::kLookup, "unknown test id " + s.test_id);
    auto [e_it, e_new] = enroll_slot.emplace(ei->second, used_enrolls.size());
    if (e_new) used_enrolls.push_back(enrolls[ei->second]);
    auto [t_it, t_new] = test_slot.emplace(ti->second, used_tests.size());
    if (t_new) used_tests.push_back(tests[ti->second]);
    slots.emplace_back(e_it->second, t_it->second);
  }

  // s(w_e, test cohort): one row per used enrollment vector.
  // s(enroll cohort, w_t): one column per used test vector.
  Matrix enroll_side = ScoreMatrix(kernel, used_enrolls, cohorts.test_cohort);
  Matrix test_side = ScoreMatrix(kernel, cohorts.enroll_cohort, used_tests);

  const long ne = static_cast<long>(used_enrolls.size());
  const long nt = static_cast<long>(used_tests.size());
  std::vector<CohortStats> enroll_stats(ne), test_stats(nt);
  const int threads = NumThreads();
#pragma omp parallel num_threads(threads)
  {
    std::vector<double> scratch;
#pragma omp for schedule(static) nowait
    for (long i = 0; i < ne; ++i) {
      scratch.resize(enroll_side.cols());
      for (Eigen::Index j = 0; j < enroll_side.cols(); ++j) scratch[j] = enroll_side(i, j);
      enroll_stats[i] = TopKStatsInPlace(scratch, cohorts.top_k);
    }
#pragma omp for schedule(static)
    for (long j = 0; j < nt; ++j) {
      scratch.assign(test_side.col(j).data(), test_side.col(j).data() + test_side.rows());
      test_stats[j] = TopKStatsInPlace(scratch, cohorts.top_k);
    }
  }
  for (long i = 0; i < ne; ++i)
    CheckSigma(enroll_stats[i], "test-cohort (enrollment side)", used_enrolls[i].id);
  for (long j = 0; j < nt; ++j)
    CheckSigma(test_stats[j], "enrollment-cohort (test side)", used_tests[j].id);

  const long n = static_cast<long>(scores.Size());
  ScoreSet out;
  out.entries.resize(n);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    const ScoreEntry &s = scores.entries[i];
    const CohortStats &es = enroll_stats[slots[i].first];
    const CohortStats &ts = test_stats[slots[i].second];
    out.entries[i] = {s.enroll_id, s.test_id,
                      0.5 * (s.score - es.mean) / es.stddev +
                          0.5 * (s.score - ts.mean) / ts.stddev};
  }
  return out;
}

}  // namespace spkback
