// tools/commands.h

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

#ifndef SPKBACK_TOOLS_COMMANDS_H_
#define SPKBACK_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spkback/metrics.h"
#include "spkback/scorenorm.h"

namespace spkback {
namespace cli {

struct SynthOptions {
  std::string out_dir;
  uint64_t seed = 1;
  int dim = 24;
  int rank = 6;
  double snr = 1.0;
  double kappa = 4.0;
  double rotation = 0.8;
  double eval_shift_rotation = 0.5;
  double eval_shift_offset = 1.0;
  double test_noise_spread = 0.0;
  int train_speakers = 2000;
  int dev_speakers = 500;
  int eval_speakers = 500;
  int cohort_speakers = 1000;
  double secondary_fraction = 0.0;
  bool binary = false;
};

struct PreprocessOptions {
  std::vector<std::string> fit_inputs;  // --fit mode when non-empty
  std::string apply;                    // preprocessor for apply mode
  std::string in;
  std::string out;
  int average_size = 0;
  std::string utt2spk;
  std::string enroll_map;
  bool mean_only = false;
  bool binary = false;
};

struct TrainPldaOptions {
  std::string in;
  std::string out;
  std::string preprocessor;
  std::string utt2spk;
  int rank = 200;
  int iterations = 10;
};

struct FitFourCovOptions {
  std::string plda1;
  std::string plda2;
  std::string side1;
  std::string side2;
  std::string utt2spk1;
  std::string utt2spk2;
  std::string out;
  bool symmetric = false;
};

struct InterpolateOptions {
  std::string in_domain;
  std::string out_domain;
  std::string out;
  double alpha = 0.5;
  int rank = 0;
};

/// Raw enrollment segments grouped into models plus raw test segments.
struct TrialInputs {
  std::string enroll;
  std::string enroll_map;
  std::string test;
};

struct ScoreOptions {
  std::string model;
  TrialInputs inputs;
  std::string trials;
  std::string out;
};

struct SnormOptions {
  std::string model;
  std::string scores;
  TrialInputs inputs;
  std::string cohort_enroll;
  std::string cohort_enroll_map;
  std::string cohort_test;
  int top_k = kDefaultTopK;  // 0 keeps the whole cohort
  std::string out;
};

struct CalibrateOptions {
  std::string scores;
  std::string trials;  // fit mode
  std::string apply;   // apply mode: calibration file
  std::string condition = "all";
  double effective_prior = 0.5;
  std::string out;
};

struct RouteScoreOptions {
  std::string config;
  TrialInputs inputs;
  std::string trials;
  std::string test_language;
  std::string enroll_segments;
  std::optional<int> top_k;
  std::string out;
};

struct EvaluateOptions {
  std::string scores;
  std::string trials;
  std::string det;
  DcfParams dcf;
};

void RunSynth(const SynthOptions &opts);
void RunPreprocess(const PreprocessOptions &opts);
void RunTrainPlda(const TrainPldaOptions &opts);
void RunFitFourCov(const FitFourCovOptions &opts);
void RunInterpolate(const InterpolateOptions &opts);
void RunScore(const ScoreOptions &opts);
void RunSnorm(const SnormOptions &opts);
void RunCalibrate(const CalibrateOptions &opts);
void RunRouteScore(const RouteScoreOptions &opts);
void RunEvaluate(const EvaluateOptions &opts);

}  // namespace cli
}  // namespace spkback

#endif  // SPKBACK_TOOLS_COMMANDS_H_
