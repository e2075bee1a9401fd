// include/spkback/synth.h

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

#ifndef SPKBACK_SYNTH_H_
#define SPKBACK_SYNTH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spkback/fourcov.h"
#include "spkback/plda.h"
#include "spkback/types.h"

namespace spkback {

/// Parameters of the two-sided generative model
///   y1 ~ N(0, I),  y2 = A y1 + eta,  eta ~ N(0, M),
///   w_i = mu_i + phi_i y_i + eps_i,  eps_i ~ N(0, gamma_i).
struct GroundTruth {
  PldaModel side1;
  PldaModel side2;
  Matrix a;  // r2 x r1
  Matrix m;  // r2 x r2

  /// Throws a parameter error unless gammas are PD, M is PSD and all
  /// dimensions agree.
  void Validate() const;
  /// The same parameters as a scoring model.
  FourCovModel AsModel() const { return {side1, side2, a, m}; }
};

struct RandomTruthOptions {
  int dim = 16;
  int rank1 = 4;
  int rank2 = 4;
  /// trace(phi1 phi1^t) / trace(gamma1); phi2 is drawn at the same scale.
  double snr = 1.0;
  /// Residual inflation of the test side, gamma2 = kappa * gamma1.
  double kappa = 1.0;
  /// Largest rotation angle (radians) applied to phi2.
  double rotation = 0.0;
  /// Norm of mu2 - mu1.
  double mean_offset = 0.0;
  /// A = rho * I (rectangular if ranks differ), M = I - A A^t. rho in [0, 1].
  double coupling = 1.0;
};

/// Random ground truth. gamma1 is a Wishart draw with dim + 2 degrees of
/// freedom scaled to unit mean eigenvalue; phi entries are i.i.d. normal.
/// When the ranks agree phi2 is the rotated phi1, else an independent draw.
GroundTruth RandomGroundTruth(const RandomTruthOptions &opts, uint64_t seed);

/// Copy of `truth` whose test side is rotated by up to `rotation` radians
/// and shifted by `mean_offset`: a second test language.
GroundTruth ShiftTestSide(const GroundTruth &truth, double rotation, double mean_offset,
                          uint64_t seed);

/// Latent speaker factors, one row per speaker.
struct SpeakerFactors {
  Matrix y1;  // S x r1
  Matrix y2;  // S x r2
};

/// Factors of speakers first_index .. first_index + n - 1. A speaker's
/// factors depend only on (seed, speaker index).
SpeakerFactors SampleFactors(const GroundTruth &truth, int n, uint64_t seed,
                             int first_index = 0);

struct SegmentOptions {
  int count = 3;             // original segments per speaker
  double noise_scale = 1.0;  // residual covariance multiplier
  /// Per-segment duration proxy: each segment's residual covariance is
  /// further scaled by exp(u), u ~ U(-noise_spread, noise_spread).
  double noise_spread = 0.0;
  /// Each original is followed by this many perturbed copies,
  /// original + N(0, augment_noise * gamma).
  int augment_copies = 0;
  double augment_noise = 0.1;
  /// Segment ids are <speaker>-<tag><k>, copies <speaker>-<tag><k>a<j>.
  std::string tag = "s";
  /// Distinguishes independent draws for the same speakers.
  uint64_t stream = 0;
};

/// Segments of one side for every speaker in `factors` (rows of the side's
/// factor matrix). Speaker ids are SyntheticSpeakerId(first_index + row).
std::vector<SpeakerGroup> SampleSegments(const PldaModel &side, const Matrix &factors,
                                         const SegmentOptions &opts, uint64_t seed,
                                         int first_index = 0);

std::string SyntheticSpeakerId(int index);

struct GenConfig {
  GroundTruth truth;
  int n_speakers = 100;
  SegmentOptions side1{3, 1.0, 0.0, 0, 0.1, "e", 1};
  SegmentOptions side2{3, 1.0, 0.0, 0, 0.1, "t", 2};
  uint64_t seed = 0;
};

struct SampledDataset {
  std::vector<SpeakerGroup> side1;
  std::vector<SpeakerGroup> side2;
  SpeakerFactors factors;
  GroundTruth truth;
};

/// Deterministic in the config: the same config gives bit-identical output
/// for any thread count.
SampledDataset SampleDataset(const GenConfig &config);

/// Exact same-speaker vs different-speaker log-likelihood ratio of a single
/// (side-1, side-2) pair under the ground truth, from explicitly assembled
/// joint covariances of [w1; w2].
double TrueLlr(const GroundTruth &truth, const Vector &w1, const Vector &w2);

/// Enrollment models, test segments and labeled trials of one split.
struct EvalSet {
  std::vector<SpeakerGroup> enrolls;  // speaker_id is the model id
  std::vector<Embedding> tests;
  TrialList trials;                   // labeled, with conditions
  std::map<std::string, int> enroll_segments;
  std::map<std::string, TestLanguage> test_language;
};

struct BenchmarkOptions {
  RandomTruthOptions truth{24, 6, 6, 1.0, 4.0, 0.8, 1.0, 1.0};
  uint64_t seed = 1;

  int train_speakers = 2000;
  int dev_speakers = 500;
  int eval_speakers = 500;
  int cohort_speakers = 1000;

  /// Enrollment sizes are uniform in [min, max] within each bucket. The
  /// training and cohort L-averages use few_segments / many_segments.
  int few_min = 1, few_max = 4;
  int many_min = 5, many_max = 12;
  int few_segments = 3;
  int many_segments = 12;
  double few_fraction = 0.5;
  /// Duration proxies: residual scale of short (few bucket) and long (many
  /// bucket) enrollment segments.
  double few_noise_scale = 1.5;
  double many_noise_scale = 1.0;

  /// Per training speaker: raw segments of each enrollment type, test
  /// segments.
  int train_few_segments = 12;
  int train_many_segments = 24;
  int train_test_segments = 8;

  /// Domain shift of the test side between the training data and the
  /// development / evaluation / cohort data (which share one domain).
  double eval_shift_rotation = 0.5;
  double eval_shift_offset = 1.0;

  /// Spread of the per-segment duration proxy on the test side.
  double test_noise_spread = 0.0;

  int tests_per_speaker = 4;
  int nontargets_per_model = 96;

  /// Second test language; off when secondary_fraction is 0.
  double secondary_fraction = 0.0;
  double secondary_rotation = 0.6;
  double secondary_offset = 1.0;
  int secondary_train_speakers = 400;
};

struct Benchmark {
  GroundTruth truth;        // training domain
  GroundTruth eval_truth;   // development, evaluation and cohort domain
  std::optional<GroundTruth> secondary_truth;  // second language, eval domain

  std::vector<SpeakerGroup> train_side1_few;
  std::vector<SpeakerGroup> train_side1_many;
  std::vector<SpeakerGroup> train_side2;
  std::vector<SpeakerGroup> train_side2_secondary;

  EvalSet dev;
  EvalSet eval;

  std::vector<SpeakerGroup> cohort_enroll_few;
  std::vector<SpeakerGroup> cohort_enroll_many;
  std::vector<Embedding> cohort_test;
};

/// Train, development, evaluation and cohort speakers are disjoint.
Benchmark SampleBenchmark(const BenchmarkOptions &opts);

}  // namespace spkback

#endif  // SPKBACK_SYNTH_H_
