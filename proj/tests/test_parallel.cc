// tests/test_parallel.cc

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

#include <random>

#include "doctest.h"
#include "oracles.h"
#include "spkback/fourcov.h"
#include "spkback/parallel.h"
#include "spkback/plda.h"
#include "spkback/scorenorm.h"

namespace spkback {

namespace {

std::vector<Embedding> RandomList(const std::string &prefix, int n, Eigen::Index d,
                                  std::mt19937_64 &rng) {
  std::vector<Embedding> out;
  for (int i = 0; i < n; ++i) out.push_back({prefix + std::to_string(i), oracle::RandomVector(d, rng)});
  return out;
}

bool SameScores(const ScoreSet &a, const ScoreSet &b) {
  if (a.Size() != b.Size()) return false;
  for (size_t i = 0; i < a.Size(); ++i)
    if (a.entries[i].score != b.entries[i].score || a.entries[i].enroll_id != b.entries[i].enroll_id ||
        a.entries[i].test_id != b.entries[i].test_id)
      return false;
  return true;
}

}  // namespace

TEST_CASE("thread count control") {
  int before = NumThreads();
  {
    ScopedNumThreads s(3);
    CHECK(NumThreads() == 3);
  }
  CHECK(NumThreads() == before);
}

TEST_CASE("parallel kernels match their serial references bitwise") {
  std::mt19937_64 rng(1);
  ScoringKernel k = BuildKernel(oracle::RandomFourCov(8, 8, 3, 3, rng));
  auto enrolls = RandomList("e", 37, 8, rng), tests = RandomList("t", 53, 8, rng);
  TrialList trials;
  for (const Embedding &e : enrolls)
    for (const Embedding &t : tests) trials.entries.push_back({e.id, t.id, {}, {}});
  std::shuffle(trials.entries.begin(), trials.entries.end(), rng);
  CohortSet cohorts{RandomList("ce", 70, 8, rng), RandomList("ct", 80, 8, rng), 20};

  ScoreSet raw_ref = ScoreBatchReference(k, enrolls, tests, trials);
  ScoreSet norm_ref = SnormBatchReference(k, cohorts, enrolls, tests, raw_ref);

  auto groups = oracle::RandomGroups(150, 4, 8, rng);
  PldaTrainingData data = PldaTrainingData::FromGroups(groups);
  PldaModel model = oracle::RandomPlda(8, 3, rng);
  model.mu = data.mu;
  PldaEStepStats serial = AccumulateEStepSerial(model, data);

  for (int threads : {1, 2, 3, 4, 7}) {
    CAPTURE(threads);
    ScopedNumThreads scope(threads);
    ScoreSet raw = ScoreBatch(k, enrolls, tests, trials);
    CHECK(SameScores(raw, raw_ref));
    CHECK(SameScores(SnormBatch(k, cohorts, enrolls, tests, raw), norm_ref));
    PldaEStepStats par = AccumulateEStep(model, data);
    // The parallel E-step sums fixed blocks, so it is reproducible across
    // thread counts and agrees with the serial loop to rounding.
    CHECK((par.sum_fy - serial.sum_fy).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((par.sum_yy - serial.sum_yy).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(par.sum_quad - serial.sum_quad) < 1e-9 * std::abs(serial.sum_quad));
    ScopedNumThreads one(1);
    PldaEStepStats base = AccumulateEStep(model, data);
    CHECK(base.sum_fy == par.sum_fy);
    CHECK(base.sum_quad == par.sum_quad);
  }
}

}  // namespace spkback
