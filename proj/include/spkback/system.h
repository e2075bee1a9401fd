// include/spkback/system.h

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

#ifndef SPKBACK_SYSTEM_H_
#define SPKBACK_SYSTEM_H_

#include <vector>

#include "spkback/fourcov.h"
#include "spkback/plda.h"

namespace spkback {

/// A complete back-end for one trial condition: each side's preprocessing
/// chain, the coupled model, and its precomputed scoring kernel. Works on raw
/// (unpreprocessed) embeddings.
struct FourCovSystem {
  Preprocessor pre1;
  Preprocessor pre2;
  FourCovModel model;
  ScoringKernel kernel;

  /// Recomputes `kernel` from `model`.
  void Rebuild() { kernel = BuildKernel(model); }

  Embedding PrepareEnroll(const SpeakerGroup &sample) const;
  Embedding PrepareTest(const Embedding &raw) const { return pre2.Apply(raw); }
  std::vector<Embedding> PrepareEnrolls(const std::vector<SpeakerGroup> &samples) const;
  std::vector<Embedding> PrepareTests(const std::vector<Embedding> &raw) const;

  AverageMode average_mode = AverageMode::kNormalizeMembers;
};

struct SystemTrainOptions {
  int rank1 = 200;
  int rank2 = 200;
  int iterations = 10;
  /// Side-1 training examples are L-averages of this many raw segments.
  int enroll_average_size = 3;
  AverageMode average_mode = AverageMode::kNormalizeMembers;
  /// Weight of the in-domain model when the test side is interpolated.
  double alpha = 0.5;
};

/// Splits each speaker's raw segments into consecutive chunks of `size` and
/// replaces every chunk by its L-average under `pre`. A trailing partial
/// chunk is kept when the speaker would otherwise have no example.
std::vector<SpeakerGroup> MakeLAverages(const std::vector<SpeakerGroup> &raw,
                                        const Preprocessor &pre, int size,
                                        AverageMode mode = AverageMode::kNormalizeMembers);

std::vector<SpeakerGroup> PrepareGroups(const std::vector<SpeakerGroup> &raw,
                                        const Preprocessor &pre);

/// Raw enrollment-type segments and the number of segments per L-average
/// training example built from them.
struct Side1Set {
  std::vector<SpeakerGroup> raw;
  int average_size = 3;
};

/// Four-covariance training: side-1 preprocessor and PLDA on L-averaged
/// enrollment-type data, side-2 preprocessor and PLDA on test-type segments,
/// coupling from speakers present on both sides (matched by speaker id).
/// When `side2_out_domain` is given, the test-side PLDA is the interpolation
/// of the in-domain model with one trained on that set (preprocessed with
/// the in-domain side-2 chain).
/// With several side-1 sets, the preprocessor is fitted on all of their
/// segments and each speaker's examples are pooled across sets.
FourCovSystem TrainFourCovSystem(const std::vector<Side1Set> &side1,
                                 const std::vector<SpeakerGroup> &side2_raw,
                                 const SystemTrainOptions &opts,
                                 const std::vector<SpeakerGroup> *side2_out_domain = nullptr);
/// Single side-1 set averaged by opts.enroll_average_size.
FourCovSystem TrainFourCovSystem(const std::vector<SpeakerGroup> &side1_raw,
                                 const std::vector<SpeakerGroup> &side2_raw,
                                 const SystemTrainOptions &opts,
                                 const std::vector<SpeakerGroup> *side2_out_domain = nullptr);

/// Baseline: one preprocessor and one symmetric PLDA trained on the pooled
/// side-1 L-averages and side-2 segments.
FourCovSystem TrainSymmetricSystem(const std::vector<Side1Set> &side1,
                                   const std::vector<SpeakerGroup> &side2_raw,
                                   const SystemTrainOptions &opts);
FourCovSystem TrainSymmetricSystem(const std::vector<SpeakerGroup> &side1_raw,
                                   const std::vector<SpeakerGroup> &side2_raw,
                                   const SystemTrainOptions &opts);

/// Prepares both sides with the system's chains, then ScoreBatch.
ScoreSet ScoreRaw(const FourCovSystem &system, const std::vector<SpeakerGroup> &enrolls,
                  const std::vector<Embedding> &tests, const TrialList &trials);

}  // namespace spkback

#endif  // SPKBACK_SYSTEM_H_
