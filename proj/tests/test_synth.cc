// tests/test_synth.cc

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

#include <algorithm>
#include <set>

#include "doctest.h"
#include "spkback/fourcov.h"
#include "spkback/linalg.h"
#include "spkback/metrics.h"
#include "spkback/parallel.h"
#include "spkback/synth.h"
#include "test_util.h"

namespace spkback {

namespace {

Matrix SampleCovariance(const std::vector<SpeakerGroup> &groups) {
  std::vector<Embedding> all;
  for (const SpeakerGroup &g : groups) all.insert(all.end(), g.members.begin(), g.members.end());
  Vector mean;
  Matrix cov;
  MeanAndCovariance(StackRows(all), &mean, &cov);
  return cov;
}

std::vector<double> Ranks(const std::vector<double> &v) {
  std::vector<size_t> idx(v.size());
  for (size_t i = 0; i < v.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
  return r;
}

double Pearson(const std::vector<double> &a, const std::vector<double> &b) {
  Eigen::Map<const Vector> x(a.data(), a.size()), y(b.data(), b.size());
  Vector xc = x.array() - x.mean(), yc = y.array() - y.mean();
  return xc.dot(yc) / (xc.norm() * yc.norm());
}

}  // namespace

TEST_CASE("ground truth validation") {
  GroundTruth t = RandomGroundTruth({}, 1);
  CHECK_NOTHROW(t.Validate());
  t.m = -Matrix::Identity(t.m.rows(), t.m.cols());
  CHECK(ThrowsKind(ErrorKind::kParameter, [&] { t.Validate(); }));
  RandomTruthOptions bad;
  bad.rank1 = 40;
  CHECK(ThrowsKind(ErrorKind::kParameter, [&] { RandomGroundTruth(bad, 1); }));
}

TEST_CASE("sample covariance follows the model") {
  RandomTruthOptions o;
  o.dim = 8;
  o.rank1 = o.rank2 = 2;
  o.kappa = 2.0;
  o.rotation = 0.4;
  GroundTruth t = RandomGroundTruth(o, 2);
  GenConfig cfg{t, 500, {10, 1.0, 0.0, 0, 0.1, "e", 1}, {10, 1.0, 0.0, 0, 0.1, "t", 2}, 3};
  SampledDataset ds = SampleDataset(cfg);
  Matrix c1 = SampleCovariance(ds.side1), c2 = SampleCovariance(ds.side2);
  CHECK((c1 - t.side1.TotalCovariance()).norm() / t.side1.TotalCovariance().norm() < 0.1);
  Matrix t2 = t.side2.phi * (t.a * t.a.transpose() + t.m) * t.side2.phi.transpose() + t.side2.gamma;
  CHECK((c2 - t2).norm() / t2.norm() < 0.1);
}

TEST_CASE("degenerate coupling makes the sides indistinguishable") {
  RandomTruthOptions o;
  o.dim = 4;
  o.rank1 = o.rank2 = 2;
  GroundTruth t = RandomGroundTruth(o, 4);
  CHECK((t.side1.phi - t.side2.phi).norm() < 1e-12);
  CHECK(t.m.norm() < 1e-12);
  GenConfig cfg{t, 2000, {2, 1.0, 0.0, 0, 0.1, "e", 1}, {2, 1.0, 0.0, 0, 0.1, "t", 2}, 5};
  SampledDataset ds = SampleDataset(cfg);
  Matrix c1 = SampleCovariance(ds.side1), c2 = SampleCovariance(ds.side2);
  CHECK((c1 - c2).norm() / c1.norm() < 0.1);
}

TEST_CASE("no speaker signal gives chance performance") {
  RandomTruthOptions o;
  o.dim = 6;
  o.snr = 0.0;
  GroundTruth t = RandomGroundTruth(o, 6);
  GenConfig cfg{t, 300, {1, 1.0, 0.0, 0, 0.1, "e", 1}, {1, 1.0, 0.0, 0, 0.1, "t", 2}, 7};
  SampledDataset ds = SampleDataset(cfg);
  ScoringKernel k = BuildKernel(t.AsModel());
  LabeledScores l;
  for (size_t i = 0; i < ds.side1.size(); ++i)
    for (size_t j = i; j < i + 3; ++j) {
      double s = ScoreTrial(k, ds.side1[i].members[0].vector, ds.side2[j % ds.side2.size()].members[0].vector);
      (j == i ? l.target : l.nontarget).push_back(s);
    }
  double spread = *std::max_element(l.nontarget.begin(), l.nontarget.end()) -
                  *std::min_element(l.nontarget.begin(), l.nontarget.end());
  CHECK(spread < 1e-9);
}

TEST_CASE("true llr agrees with the scoring kernel") {
  GroundTruth t = RandomGroundTruth({10, 3, 3, 1.0, 2.0, 0.5, 0.5, 0.8}, 8);
  ScoringKernel k = BuildKernel(t.AsModel());
  SampledDataset ds = SampleDataset({t, 50, {1, 1.0, 0.0, 0, 0.1, "e", 1}, {1, 1.0, 0.0, 0, 0.1, "t", 2}, 9});
  for (size_t i = 0; i < 50; ++i) {
    const Vector &a = ds.side1[i].members[0].vector, &b = ds.side2[(i * 7) % 50].members[0].vector;
    CHECK(std::abs(TrueLlr(t, a, b) - ScoreTrial(k, a, b)) < 1e-8);
  }
}

TEST_CASE("symmetric truth matches plda llr") {
  GroundTruth t = RandomGroundTruth({6, 2, 2, 1.0, 1.0, 0.0, 0.0, 1.0}, 10);
  SampledDataset ds = SampleDataset({t, 20, {1, 1.0, 0.0, 0, 0.1, "e", 1}, {1, 1.0, 0.0, 0, 0.1, "t", 2}, 11});
  for (size_t i = 0; i < 20; ++i) {
    const Vector &a = ds.side1[i].members[0].vector, &b = ds.side2[(i + 1) % 20].members[0].vector;
    CHECK(std::abs(TrueLlr(t, a, b) - PldaLlr(t.side1, a, b)) < 1e-9);
  }
}

TEST_CASE("true llr is monotone in the empirical posterior") {
  GroundTruth t = RandomGroundTruth({8, 2, 2, 1.0, 1.5, 0.3, 0.0, 0.9}, 12);
  const int n = 4000;
  SampledDataset ds = SampleDataset({t, n, {1, 1.0, 0.0, 0, 0.1, "e", 1}, {1, 1.0, 0.0, 0, 0.1, "t", 2}, 13});
  // Equal numbers of target and nontarget trials, so the posterior at prior
  // 1/2 is sigmoid(llr). Bin by llr and compare with observed frequencies.
  std::vector<std::pair<double, int>> trials;
  for (int i = 0; i < n; ++i) {
    const Vector &a = ds.side1[i].members[0].vector;
    trials.push_back({TrueLlr(t, a, ds.side2[i].members[0].vector), 1});
    trials.push_back({TrueLlr(t, a, ds.side2[(i + 1) % n].members[0].vector), 0});
  }
  std::sort(trials.begin(), trials.end());
  const int bins = 10, per_bin = static_cast<int>(trials.size()) / bins;
  std::vector<double> predicted, observed;
  for (int b = 0; b < bins; ++b) {
    double p = 0.0, f = 0.0;
    for (int i = b * per_bin; i < (b + 1) * per_bin; ++i) {
      p += 1.0 / (1.0 + std::exp(-trials[i].first));
      f += trials[i].second;
    }
    predicted.push_back(p / per_bin);
    observed.push_back(f / per_bin);
  }
  CHECK(Pearson(Ranks(predicted), Ranks(observed)) > 0.99);
  for (int b = 0; b < bins; ++b) CHECK(std::abs(predicted[b] - observed[b]) < 0.05);
}

TEST_CASE("sampling is deterministic and thread independent") {
  GroundTruth t = RandomGroundTruth({}, 14);
  GenConfig cfg{t, 64, {3, 1.0, 0.5, 1, 0.1, "e", 1}, {2, 1.0, 0.0, 0, 0.1, "t", 2}, 15};
  SampledDataset a = SampleDataset(cfg);
  SampledDataset b;
  {
    ScopedNumThreads threads(3);
    b = SampleDataset(cfg);
  }
  REQUIRE(a.side1.size() == b.side1.size());
  for (size_t i = 0; i < a.side1.size(); ++i) {
    REQUIRE(a.side1[i].Size() == 6);
    for (int k = 0; k < a.side1[i].Size(); ++k) {
      CHECK(a.side1[i].members[k].id == b.side1[i].members[k].id);
      CHECK(a.side1[i].members[k].vector == b.side1[i].members[k].vector);
    }
  }
  CHECK(a.side1[0].members[1].id == SyntheticSpeakerId(0) + "-e0a0");
  CHECK(a.factors.y1 == b.factors.y1);
}

TEST_CASE("benchmark splits are disjoint") {
  BenchmarkOptions o;
  o.truth.dim = 8;
  o.truth.rank1 = o.truth.rank2 = 2;
  o.train_speakers = 50;
  o.dev_speakers = o.eval_speakers = 10;
  o.cohort_speakers = 20;
  o.nontargets_per_model = 5;
  o.train_few_segments = 3;
  o.train_many_segments = 6;
  Benchmark b = SampleBenchmark(o);
  std::set<std::string> train, eval;
  for (const SpeakerGroup &g : b.train_side2) train.insert(g.speaker_id);
  for (const SpeakerGroup &g : b.eval.enrolls) eval.insert(g.speaker_id);
  for (const SpeakerGroup &g : b.dev.enrolls) CHECK(eval.count(g.speaker_id) == 0);
  for (const std::string &s : eval) CHECK(train.count(s) == 0);
  CHECK(b.eval.trials.HasLabels());
  for (const Trial &t : b.eval.trials.entries) {
    int n = b.eval.enroll_segments.at(t.enroll_id);
    CHECK(t.condition->enroll_bucket == (n < 5 ? EnrollBucket::kFew : EnrollBucket::kMany));
  }
}

}  // namespace spkback
