// include/spkback/fourcov.h

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

#ifndef SPKBACK_FOURCOV_H_
#define SPKBACK_FOURCOV_H_

#include <utility>
#include <vector>

#include "spkback/plda.h"
#include "spkback/types.h"

namespace spkback {

/// Two side-specific PLDA models whose speaker factors are coupled by
///   y2 = A y1 + eta,  eta ~ N(0, M).
/// Side 1 is the enrollment side, side 2 the test side.
struct FourCovModel {
  PldaModel plda1;
  PldaModel plda2;
  Matrix a;  // r2 x r1
  Matrix m;  // r2 x r2, symmetric PSD

  void Validate() const;
};

/// The degenerate model plda1 = plda2 = plda, A = I, M = 0, whose score is
/// the symmetric PLDA LLR.
FourCovModel MakeSymmetricModel(const PldaModel &plda);

/// Joint covariance of a stacked [w1; w2] pair under each hypothesis. The
/// same-speaker cross block is phi1 A^t phi2^t; the different-speaker
/// hypothesis uses each side's own marginal.
Matrix TargetCovariance(const FourCovModel &model);
Matrix NontargetCovariance(const FourCovModel &model);

/// Precomputed quadratic form for the LLR
///   s = -1/2 z^t K z + c,  z = [w_e - mu1; w_t - mu2],
///   K = Sigma_tar^-1 - Sigma_non^-1,
///   c = -1/2 (log det Sigma_tar - log det Sigma_non).
struct ScoringKernel {
  Vector mu1;
  Vector mu2;
  Matrix k;  // (d1 + d2) x (d1 + d2)
  double c = 0.0;

  Eigen::Index Dim1() const { return mu1.size(); }
  Eigen::Index Dim2() const { return mu2.size(); }
};

ScoringKernel BuildKernel(const FourCovModel &model);

/// Least-squares coupling of speaker factors. Rows of y1 (S x r1) and y2
/// (S x r2) are the paired factors of one speaker. Sets
///   A = Y2^t Y1 (Y1^t Y1)^-1,  M = cov(y2 - A y1).
void FitCouplingFromFactors(const Matrix &y1, const Matrix &y2, Matrix *a,
                            Matrix *m);

/// Fits A and M from paired (side-1, side-2) samples of the same training
/// speakers, each already preprocessed for its side. Factors are posterior
/// means using each side's full sample.
FourCovModel FitCoupling(const PldaModel &plda1, const PldaModel &plda2,
                         const std::vector<std::pair<SpeakerGroup, SpeakerGroup>> &pairs);

/// Order matters: w_e is scored on the enrollment side, w_t on the test side.
double ScoreTrial(const ScoringKernel &kernel, const Vector &w_e, const Vector &w_t);

/// Scores every trial. Enrollment and test vectors must already be prepared
/// for their side. Parallel over trials with per-vector projections cached;
/// output order is the trial order.
ScoreSet ScoreBatch(const ScoringKernel &kernel, const std::vector<Embedding> &enrolls,
                    const std::vector<Embedding> &tests, const TrialList &trials);
/// ScoreTrial in a loop.
ScoreSet ScoreBatchReference(const ScoringKernel &kernel,
                             const std::vector<Embedding> &enrolls,
                             const std::vector<Embedding> &tests,
                             const TrialList &trials);

/// All-pairs scores: rows are enrollment vectors, columns are test vectors.
Matrix ScoreMatrix(const ScoringKernel &kernel, const std::vector<Embedding> &enrolls,
                   const std::vector<Embedding> &tests);

}  // namespace spkback

#endif  // SPKBACK_FOURCOV_H_
