// tests/test_fourcov.cc

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
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "spkback/fourcov.h"
#include "spkback/synth.h"
#include "test_util.h"

namespace spkback {

TEST_CASE("covariance assembly matches the oracle") {
  std::mt19937_64 rng(1);
  FourCovModel m = oracle::RandomFourCov(5, 4, 3, 2, rng);
  CHECK((TargetCovariance(m) - oracle::TargetCovariance(m)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((NontargetCovariance(m) - oracle::NontargetCovariance(m)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("score equals the two-gaussian llr") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    FourCovModel m = oracle::RandomFourCov(6, 6, 3, 3, rng);
    ScoringKernel k = BuildKernel(m);
    for (int j = 0; j < 5; ++j) {
      Vector a = oracle::RandomVector(6, rng), b = oracle::RandomVector(6, rng);
      CHECK(std::abs(ScoreTrial(k, a, b) - oracle::FourCovLlr(m, a, b)) < 1e-8);
    }
    CHECK(ScoreTrial(k, m.plda1.mu, m.plda2.mu) == doctest::Approx(k.c).epsilon(1e-14));
  }
}

TEST_CASE("hand-set two dimensional kernel") {
  FourCovModel m;
  m.plda1 = {Vector::Zero(2), (Matrix(2, 1) << 1.0, 0.5).finished(),
             (Matrix(2, 2) << 1.0, 0.2, 0.2, 0.8).finished()};
  m.plda2 = {Vector::Zero(2), (Matrix(2, 1) << 0.3, -1.2).finished(),
             (Matrix(2, 2) << 2.0, 0.0, 0.0, 0.5).finished()};
  m.a = Matrix::Constant(1, 1, 0.7);
  m.m = Matrix::Constant(1, 1, 0.51);
  ScoringKernel k = BuildKernel(m);
  Matrix tar = oracle::TargetCovariance(m), non = oracle::NontargetCovariance(m);
  Matrix expect = Eigen::FullPivLU<Matrix>(tar).inverse() - Eigen::FullPivLU<Matrix>(non).inverse();
  // The kernel stores K with the -1/2 applied at scoring time.
  Vector z = Vector::LinSpaced(4, -1.0, 2.0);
  double quad = -0.5 * z.dot(expect * z);
  double c = -0.5 * (std::log(tar.determinant()) - std::log(non.determinant()));
  CHECK(std::abs(k.c - c) < 1e-10);
  CHECK(std::abs(ScoreTrial(k, z.head(2), z.tail(2)) - (quad + c)) < 1e-10);
}

TEST_CASE("no speaker information gives a zero kernel") {
  std::mt19937_64 rng(3);
  FourCovModel m = oracle::RandomFourCov(3, 3, 2, 2, rng);
  m.plda1.phi.setZero();
  // The test-side marginal must also agree between the hypotheses.
  m.a = 0.5 * Matrix::Identity(2, 2);
  m.m = 0.75 * Matrix::Identity(2, 2);
  ScoringKernel k = BuildKernel(m);
  CHECK(k.k.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(k.c) < 1e-12);
  CHECK(std::abs(ScoreTrial(k, oracle::RandomVector(3, rng), oracle::RandomVector(3, rng))) < 1e-12);
}

TEST_CASE("symmetric collapse") {
  std::mt19937_64 rng(4);
  PldaModel p = oracle::RandomPlda(6, 3, rng);
  FourCovModel m{p, p, Matrix::Identity(3, 3), Matrix::Zero(3, 3)};
  ScoringKernel k = BuildKernel(m);
  ScoringKernel s = BuildKernel(MakeSymmetricModel(p));
  CHECK((k.k - s.k).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 100; ++i) {
    Vector a = oracle::RandomVector(6, rng), b = oracle::RandomVector(6, rng);
    CHECK(std::abs(ScoreTrial(k, a, b) - PldaLlr(p, a, b)) < 1e-9);
  }
}

TEST_CASE("asymmetric models are not symmetric in their arguments") {
  std::mt19937_64 rng(5);
  FourCovModel m = oracle::RandomFourCov(4, 4, 2, 2, rng);
  ScoringKernel k = BuildKernel(m);
  int differ = 0;
  for (int i = 0; i < 20; ++i) {
    Vector a = oracle::RandomVector(4, rng), b = oracle::RandomVector(4, rng);
    if (std::abs(ScoreTrial(k, a, b) - ScoreTrial(k, b, a)) > 1e-6) ++differ;
  }
  CHECK(differ == 20);
}

TEST_CASE("coupling from factors") {
  std::mt19937_64 rng(6);
  SUBCASE("perfect coupling") {
    Matrix y1 = oracle::RandomMatrix(200, 3, rng);
    Matrix a, m;
    FitCouplingFromFactors(y1, y1, &a, &m);
    CHECK((a - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("scalar slope") {
    Matrix y1 = oracle::RandomMatrix(300, 1, rng);
    Matrix y2 = 0.4 * y1 + oracle::RandomMatrix(300, 1, rng, 0.3);
    Matrix a, m;
    FitCouplingFromFactors(y1, y2, &a, &m);
    double sxy = y1.col(0).dot(y2.col(0)), sxx = y1.col(0).squaredNorm();
    CHECK(a(0, 0) == doctest::Approx(sxy / sxx).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch") {
    Matrix a, m;
    CHECK(ThrowsKind(ErrorKind::kDimension, [&] {
      FitCouplingFromFactors(Matrix::Zero(5, 2), Matrix::Zero(4, 2), &a, &m);
    }));
  }
}

TEST_CASE("batch scoring") {
  std::mt19937_64 rng(7);
  FourCovModel m = oracle::RandomFourCov(5, 5, 2, 2, rng);
  ScoringKernel k = BuildKernel(m);
  std::vector<Embedding> enrolls, tests;
  for (int i = 0; i < 30; ++i) enrolls.push_back({"e" + std::to_string(i), oracle::RandomVector(5, rng)});
  for (int i = 0; i < 40; ++i) tests.push_back({"t" + std::to_string(i), oracle::RandomVector(5, rng)});
  TrialList trials;
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 40; ++j) trials.entries.push_back({enrolls[i].id, tests[j].id, {}, {}});

  ScoreSet s = ScoreBatch(k, enrolls, tests, trials);
  REQUIRE(s.Size() == trials.Size());
  for (size_t i = 0; i < s.Size(); ++i) {
    int e = std::stoi(trials.entries[i].enroll_id.substr(1)), t = std::stoi(trials.entries[i].test_id.substr(1));
    CHECK(s.entries[i].enroll_id == trials.entries[i].enroll_id);
    CHECK(std::abs(s.entries[i].score - ScoreTrial(k, enrolls[e].vector, tests[t].vector)) < 1e-12);
  }

  TrialList one{{trials.entries[17]}};
  CHECK(ScoreBatch(k, enrolls, tests, one).entries[0].score == s.entries[17].score);

  TrialList permuted = trials;
  std::shuffle(permuted.entries.begin(), permuted.entries.end(), rng);
  ScoreSet p = ScoreBatch(k, enrolls, tests, permuted);
  std::map<std::pair<std::string, std::string>, double> by_pair;
  for (const ScoreEntry &e : s.entries) by_pair[{e.enroll_id, e.test_id}] = e.score;
  for (const ScoreEntry &e : p.entries) CHECK(by_pair.at({e.enroll_id, e.test_id}) == e.score);

  Matrix full = ScoreMatrix(k, enrolls, tests);
  CHECK(full(3, 5) == s.entries[3 * 40 + 5].score);

  TrialList bad{{{"e0", "missing", {}, {}}}};
  try {
    ScoreBatch(k, enrolls, tests, bad);
    CHECK(false);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kLookup);
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
}

TEST_CASE("target trials outscore nontarget trials") {
  RandomTruthOptions to;
  to.dim = 8;
  to.rank1 = to.rank2 = 3;
  to.kappa = 2.0;
  to.rotation = 0.5;
  GroundTruth truth = RandomGroundTruth(to, 41);
  GenConfig cfg{truth, 100, {1, 1.0, 0.0, 0, 0.1, "e", 1}, {1, 1.0, 0.0, 0, 0.1, "t", 2}, 42};
  SampledDataset ds = SampleDataset(cfg);
  ScoringKernel k = BuildKernel(truth.AsModel());
  double tgt = 0.0, non = 0.0;
  int nt = 0, nn = 0;
  for (size_t i = 0; i < ds.side1.size(); ++i)
    for (size_t j = 0; j < ds.side2.size(); ++j) {
      double s = ScoreTrial(k, ds.side1[i].members[0].vector, ds.side2[j].members[0].vector);
      if (i == j) {
        tgt += s;
        ++nt;
      } else {
        non += s;
        ++nn;
      }
    }
  CHECK(tgt / nt > non / nn);
}

}  // namespace spkback
