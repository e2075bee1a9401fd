// tests/test_metrics.cc

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
#include "spkback/metrics.h"
#include "test_util.h"

namespace spkback {

TEST_CASE("separable scores") {
  LabeledScores s{{1.0, 2.0, 3.0}, {-1.0, 0.0}};
  CHECK(ComputeEer(s) == 0.0);
  CHECK(ComputeMinDcf(s) == 0.0);
}

TEST_CASE("hand built crossing") {
  LabeledScores s{{2.0, 0.5}, {1.0, -1.0}};
  CHECK(ComputeEer(s) == doctest::Approx(0.5));
  CHECK(ComputeEer(s) == oracle::BruteEer(s.target, s.nontarget));
}

TEST_CASE("constant scores") {
  LabeledScores s{{0.3, 0.3, 0.3}, {0.3, 0.3}};
  CHECK(ComputeMinDcf(s) == doctest::Approx(1.0));
  std::vector<DetPoint> p = DetPoints(s);
  REQUIRE(p.size() == 2);
  CHECK(p.front() == DetPoint{1.0, 0.0});
  CHECK(p.back() == DetPoint{0.0, 1.0});
}

TEST_CASE("coin flip labels") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution coin(0.5);
  LabeledScores s;
  for (int i = 0; i < 100000; ++i) (coin(rng) ? s.target : s.nontarget).push_back(nd(rng));
  CHECK(std::abs(ComputeEer(s) - 0.5) < 0.01);
}

TEST_CASE("det staircase") {
  LabeledScores s{{1.0}, {0.0}};
  std::vector<DetPoint> p = DetPoints(s);
  // Rejecting the nontarget only gives the (0, 0) corner.
  CHECK(p == std::vector<DetPoint>{{1.0, 0.0}, {0.0, 0.0}, {0.0, 1.0}});

  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  LabeledScores r;
  for (int i = 0; i < 30; ++i) r.target.push_back(nd(rng) + 1.0);
  for (int i = 0; i < 20; ++i) r.nontarget.push_back(nd(rng));
  std::vector<DetPoint> pts = DetPoints(r);
  CHECK(pts == oracle::BruteDetPoints(r.target, r.nontarget));
  for (size_t i = 1; i < pts.size(); ++i) {
    CHECK(pts[i].p_fa <= pts[i - 1].p_fa);
    CHECK(pts[i].p_miss >= pts[i - 1].p_miss);
  }

  // Negating scores and swapping labels mirrors the curve.
  LabeledScores mirror;
  for (double x : r.nontarget) mirror.target.push_back(-x);
  for (double x : r.target) mirror.nontarget.push_back(-x);
  std::vector<DetPoint> m = DetPoints(mirror);
  REQUIRE(m.size() == pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(m[i].p_fa == pts[pts.size() - 1 - i].p_miss);
    CHECK(m[i].p_miss == pts[pts.size() - 1 - i].p_fa);
  }
}

TEST_CASE("small random instance against the exhaustive sweep") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  LabeledScores s;
  for (int i = 0; i < 8; ++i) s.target.push_back(nd(rng) + 0.5);
  for (int i = 0; i < 12; ++i) s.nontarget.push_back(nd(rng));
  CHECK(oracle::BruteDetPoints(s.target, s.nontarget).size() == 21);
  DcfParams p;
  CHECK(ComputeMinDcf(s, p) == oracle::BruteMinDcf(s.target, s.nontarget, p));
  CHECK(ComputeEer(s) == oracle::BruteEer(s.target, s.nontarget));
}

TEST_CASE("monotone transforms leave metrics unchanged") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  LabeledScores s, t;
  for (int i = 0; i < 200; ++i) s.target.push_back(nd(rng) + 1.0);
  for (int i = 0; i < 300; ++i) s.nontarget.push_back(nd(rng));
  for (double x : s.target) t.target.push_back(std::exp(x));
  for (double x : s.nontarget) t.nontarget.push_back(std::exp(x));
  CHECK(ComputeEer(s) == ComputeEer(t));
  CHECK(ComputeMinDcf(s) == ComputeMinDcf(t));
  double eer = ComputeEer(s), dcf = ComputeMinDcf(s);
  CHECK(eer >= 0.0);
  CHECK(eer <= 0.5);
  CHECK(dcf >= 0.0);
  CHECK(dcf <= 1.0);
}

TEST_CASE("metric preconditions") {
  LabeledScores s{{1.0}, {}};
  CHECK(ThrowsKind(ErrorKind::kMetric, [&] { ComputeEer(s); }));
  CHECK(ThrowsKind(ErrorKind::kMetric, [&] { DetPoints(s); }));
  DcfParams bad{0.0, 1.0, 1.0};
  LabeledScores ok{{1.0}, {0.0}};
  CHECK(ThrowsKind(ErrorKind::kParameter, [&] { ComputeMinDcf(ok, bad); }));
}

}  // namespace spkback
