// include/spkback/calibration.h

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

#ifndef SPKBACK_CALIBRATION_H_
#define SPKBACK_CALIBRATION_H_

#include <string>
#include <vector>

#include "spkback/types.h"

namespace spkback {

/// s -> scale * s + offset, scale > 0.
struct CalibrationModel {
  double scale = 1.0;
  double offset = 0.0;
  /// Condition the model was fitted for ("all" when not condition specific).
  std::string condition = "all";

  double Apply(double s) const { return scale * s + offset; }
};

struct CalibrationOptions {
  double effective_prior = 0.5;
  double l2 = 1e-4;         // penalty l2/2 * scale^2
  double tolerance = 1e-8;  // on the gradient norm
  int max_iterations = 200;
  int min_per_class = 10;
};

struct CalibrationFitStats {
  std::vector<double> objective;  // one entry per accepted iterate, first is the start
  double gradient_norm = 0.0;
  int iterations = 0;
};

/// Prior-weighted logistic-regression objective
///   P * mean_tgt log(1 + e^{-(a s + b + logit P)})
///   + (1 - P) * mean_non log(1 + e^{a s + b + logit P}) + l2/2 a^2.
double CalibrationObjective(const LabeledScores &scores, double scale, double offset,
                            const CalibrationOptions &opts = {});

/// Minimizes CalibrationObjective by damped Newton iterations.
CalibrationModel FitCalibration(const LabeledScores &scores,
                                const CalibrationOptions &opts = {},
                                CalibrationFitStats *stats = nullptr);
CalibrationModel FitCalibration(const ScoreSet &scores, const TrialList &trials,
                                const CalibrationOptions &opts = {},
                                CalibrationFitStats *stats = nullptr);

ScoreSet ApplyCalibration(const CalibrationModel &model, const ScoreSet &scores);

/// "<condition> <scale> <offset>" on one line, with a comment header.
void WriteCalibration(const std::string &path, const CalibrationModel &model);
CalibrationModel ReadCalibration(const std::string &path);

}  // namespace spkback

#endif  // SPKBACK_CALIBRATION_H_
