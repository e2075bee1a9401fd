// tests/oracles.h

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

#ifndef SPKBACK_TESTS_ORACLES_H_
#define SPKBACK_TESTS_ORACLES_H_

// Deliberately naive reference implementations. They share no code path with
// the library kernels they check: dense LU instead of Cholesky, explicit
// threshold loops instead of sorted sweeps, full sorts instead of partial
// selection.

#include <cstdint>
#include <random>
#include <vector>

#include "spkback/fourcov.h"
#include "spkback/metrics.h"
#include "spkback/plda.h"
#include "spkback/scorenorm.h"

namespace spkback {
namespace oracle {

/// log N(x; 0, cov) via a full-pivot LU determinant and solve.
double GaussianLogPdf(const Matrix &cov, const Vector &x);

/// Joint covariances of [w1; w2] assembled entry block by entry block.
Matrix TargetCovariance(const FourCovModel &model);
Matrix NontargetCovariance(const FourCovModel &model);

/// Two-Gaussian log-density difference for one pair.
double FourCovLlr(const FourCovModel &model, const Vector &w1, const Vector &w2);

/// Random SPD matrix with eigenvalues bounded away from zero.
Matrix RandomSpd(Eigen::Index d, std::mt19937_64 &rng, double floor = 0.2);
Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng,
                    double scale = 1.0);
Vector RandomVector(Eigen::Index d, std::mt19937_64 &rng, double scale = 1.0);
PldaModel RandomPlda(Eigen::Index d, Eigen::Index r, std::mt19937_64 &rng);
/// Random coupled model; M is a random PSD matrix (possibly singular).
FourCovModel RandomFourCov(Eigen::Index d1, Eigen::Index d2, Eigen::Index r1, Eigen::Index r2,
                           std::mt19937_64 &rng);

/// Operating points from an explicit count at every candidate threshold
/// (-inf, midpoints of sorted distinct scores, +inf), in increasing-threshold
/// order. O(n^2).
std::vector<DetPoint> BruteDetPoints(const std::vector<double> &target,
                                     const std::vector<double> &nontarget);
double BruteEer(const std::vector<double> &target, const std::vector<double> &nontarget);
double BruteMinDcf(const std::vector<double> &target, const std::vector<double> &nontarget,
                   const DcfParams &params);

/// Full sort, slice the top k (extended over ties), two-pass mean / std.
CohortStats SortSliceStats(std::vector<double> scores, std::optional<int> top_k);

/// Random labeled embeddings of dimension d grouped as speakers.
std::vector<SpeakerGroup> RandomGroups(int speakers, int per_speaker, Eigen::Index d,
                                       std::mt19937_64 &rng);

}  // namespace oracle
}  // namespace spkback

#endif  // SPKBACK_TESTS_ORACLES_H_
