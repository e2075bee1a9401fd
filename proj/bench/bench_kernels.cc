// bench/bench_kernels.cc

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

// Serial reference vs OpenMP kernel timings. Thread count follows
// SPKBACK_NUM_THREADS (or the OpenMP default).

#include <random>

#include <benchmark/benchmark.h>

#include "spkback/fourcov.h"
#include "spkback/parallel.h"
#include "spkback/plda.h"
#include "spkback/scorenorm.h"
#include "spkback/synth.h"

namespace spkback {
namespace {

struct Problem {
  ScoringKernel kernel;
  std::vector<Embedding> enrolls, tests;
  TrialList trials;
  CohortSet cohorts;
  ScoreSet raw;
  ScoreSet raw_subset;  // the naive S-norm reference is too slow for all trials
  PldaModel plda;
  PldaTrainingData data;
};

const Problem &GetProblem() {
  static const Problem p = [] {
    Problem p;
    GroundTruth truth = RandomGroundTruth({64, 16, 16, 1.0, 2.0, 0.5, 0.0, 0.9}, 1);
    p.kernel = BuildKernel(truth.AsModel());
    GenConfig cfg{truth, 600, {4, 1.0, 0.0, 0, 0.1, "e", 1}, {4, 1.0, 0.0, 0, 0.1, "t", 2}, 2};
    SampledDataset ds = SampleDataset(cfg);
    for (int i = 0; i < 200; ++i) p.enrolls.push_back(ds.side1[i].members[0]);
    for (int i = 0; i < 200; ++i) p.tests.push_back(ds.side2[i].members[0]);
    for (const Embedding &e : p.enrolls)
      for (const Embedding &t : p.tests) p.trials.entries.push_back({e.id, t.id, {}, {}});
    for (int i = 200; i < 600; ++i) {
      p.cohorts.enroll_cohort.push_back(ds.side1[i].members[1]);
      p.cohorts.test_cohort.push_back(ds.side2[i].members[1]);
    }
    p.cohorts.top_k = 100;
    p.raw = ScoreBatchReference(p.kernel, p.enrolls, p.tests, p.trials);
    p.raw_subset.entries.assign(p.raw.entries.begin(), p.raw.entries.begin() + 2000);
    p.data = PldaTrainingData::FromGroups(ds.side1);
    p.plda = truth.side1;
    p.plda.mu = p.data.mu;
    return p;
  }();
  return p;
}

void BM_ScoreBatchSerial(benchmark::State &state) {
  const Problem &p = GetProblem();
  for (auto _ : state)
    benchmark::DoNotOptimize(ScoreBatchReference(p.kernel, p.enrolls, p.tests, p.trials));
  state.SetItemsProcessed(state.iterations() * p.trials.Size());
}

void BM_ScoreBatchParallel(benchmark::State &state) {
  const Problem &p = GetProblem();
  for (auto _ : state) benchmark::DoNotOptimize(ScoreBatch(p.kernel, p.enrolls, p.tests, p.trials));
  state.SetItemsProcessed(state.iterations() * p.trials.Size());
  state.counters["threads"] = NumThreads();
}

void BM_SnormSerial(benchmark::State &state) {
  const Problem &p = GetProblem();
  for (auto _ : state)
    benchmark::DoNotOptimize(SnormBatchReference(p.kernel, p.cohorts, p.enrolls, p.tests, p.raw_subset));
}

void BM_SnormParallel(benchmark::State &state) {
  const Problem &p = GetProblem();
  for (auto _ : state)
    benchmark::DoNotOptimize(SnormBatch(p.kernel, p.cohorts, p.enrolls, p.tests, p.raw_subset));
  state.counters["threads"] = NumThreads();
}

void BM_EStepSerial(benchmark::State &state) {
  const Problem &p = GetProblem();
  for (auto _ : state) benchmark::DoNotOptimize(AccumulateEStepSerial(p.plda, p.data));
}

void BM_EStepParallel(benchmark::State &state) {
  const Problem &p = GetProblem();
  for (auto _ : state) benchmark::DoNotOptimize(AccumulateEStep(p.plda, p.data));
  state.counters["threads"] = NumThreads();
}

BENCHMARK(BM_ScoreBatchSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreBatchParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SnormSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SnormParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EStepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EStepParallel)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace spkback

BENCHMARK_MAIN();
