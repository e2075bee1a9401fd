// include/spkback/plda.h

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

#ifndef SPKBACK_PLDA_H_
#define SPKBACK_PLDA_H_

#include <vector>

#include "spkback/types.h"

namespace spkback {

/// Centering + whitening fitted on one side's training data. Apply() also
/// length-normalizes, which is the full preprocessing chain used before
/// PLDA; Whiten() stops before the length normalization.
struct Preprocessor {
  Vector mean;
  Matrix whitener;

  Eigen::Index Dim() const { return mean.size(); }
  Vector Whiten(const Vector &w) const;
  Vector Apply(const Vector &w) const;
  Embedding Apply(const Embedding &e) const { return {e.id, Apply(e.vector)}; }
  std::vector<Embedding> Apply(const std::vector<Embedding> &list) const;

  static Preprocessor Identity(Eigen::Index dim);
};

/// Mean and total-covariance inverse square root of `data`. Needs at least
/// dim + 1 linearly independent points.
Preprocessor FitPreprocessor(const std::vector<Embedding> &data);

/// w / |w|. Throws a domain error for the zero vector.
Vector LengthNormalize(const Vector &w);

enum class AverageMode {
  kNormalizeMembers,  // normalize each preprocessed member, average, normalize
  kMeanOnly,          // average the preprocessed members, normalize
};

/// Length-normalized average of a preprocessed enrollment sample, the single
/// vector that represents a multi-segment speaker model. The result keeps the
/// speaker id as its id.
Embedding EnrollAverage(const SpeakerGroup &sample, const Preprocessor &pre,
                        AverageMode mode = AverageMode::kNormalizeMembers);

/// Gaussian PLDA for one data type:
///   w = mu + phi * y + eps,  y ~ N(0, I_r),  eps ~ N(0, gamma).
struct PldaModel {
  Vector mu;     // d
  Matrix phi;    // d x r speaker loading
  Matrix gamma;  // d x d residual covariance

  Eigen::Index Dim() const { return mu.size(); }
  Eigen::Index Rank() const { return phi.cols(); }
  Matrix BetweenCovariance() const { return phi * phi.transpose(); }
  Matrix TotalCovariance() const { return BetweenCovariance() + gamma; }
  /// Throws if dims disagree or gamma is not positive definite.
  void Validate() const;
};

struct PldaTrainOptions {
  int rank = 200;        // clipped to the data dimension by callers that ask
  int iterations = 10;
  double gamma_floor = 1e-6;  // relative to trace(gamma) / d
};

struct PldaTrainStats {
  /// Marginal log-likelihood of the training data under the parameters
  /// entering each iteration, plus one final entry for the returned model.
  std::vector<double> log_likelihood;
  bool gamma_floor_engaged = false;
};

/// Per-speaker sufficient statistics; everything the EM loop needs from the
/// training data.
struct PldaTrainingData {
  Vector mu;                 // global data mean
  Matrix scatter;            // sum_k (w_k - mu)(w_k - mu)^t over all data
  std::vector<int> counts;   // n_s
  Matrix sums;               // d x S, column s = sum_k (w_k - mu)
  long total_count = 0;

  int NumSpeakers() const { return static_cast<int>(counts.size()); }
  static PldaTrainingData FromGroups(const std::vector<SpeakerGroup> &groups);
};

/// E-step accumulators.
struct PldaEStepStats {
  Matrix sum_fy;    // d x r : sum_s f_s E[y_s]^t
  Matrix sum_yy;    // r x r : sum_s n_s E[y_s y_s^t]
  double sum_quad = 0.0;  // sum_s (log det P_s - g_s^t P_s^{-1} g_s)

  void Add(const PldaEStepStats &other);
};

/// E-step over all speakers. The parallel version sums fixed-size speaker
/// blocks and merges them in block order, so the result does not depend on
/// the thread count.
PldaEStepStats AccumulateEStep(const PldaModel &model,
                               const PldaTrainingData &data);
/// Single loop over speakers; the reference the parallel kernel is tested
/// against.
PldaEStepStats AccumulateEStepSerial(const PldaModel &model,
                                     const PldaTrainingData &data);

/// Exact marginal log-likelihood of the training data.
double PldaLogLikelihood(const PldaModel &model, const PldaTrainingData &data,
                         const PldaEStepStats &estep);

/// EM training (Prince & Elder). mu is the global data mean.
PldaModel TrainPlda(const std::vector<SpeakerGroup> &groups,
                    const PldaTrainOptions &opts,
                    PldaTrainStats *stats = nullptr);

/// Posterior mean of the speaker factor given a sample of n_s members:
///   (n_s phi^t gamma^-1 phi + I)^-1 phi^t gamma^-1 sum_k (w_k - mu)
Vector SpeakerFactor(const PldaModel &model, const SpeakerGroup &sample);
Vector SpeakerFactor(const PldaModel &model, int count, const Vector &centered_sum);

/// Same-speaker vs different-speaker log-likelihood ratio of a symmetric
/// PLDA, both vectors of the same type.
double PldaLlr(const PldaModel &model, const Vector &w1, const Vector &w2);

/// Convex combination of two models' between/within covariances, refactored
/// to `rank` (default: in_domain's rank). Eigen-mass of the between
/// covariance beyond the rank is folded isotropically into gamma.
PldaModel InterpolatePlda(const PldaModel &in_domain, const PldaModel &out_domain,
                          double alpha, int rank = 0);

}  // namespace spkback

#endif  // SPKBACK_PLDA_H_
