// include/spkback/metrics.h

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

#ifndef SPKBACK_METRICS_H_
#define SPKBACK_METRICS_H_

#include <vector>

#include "spkback/types.h"

namespace spkback {

struct DcfParams {
  double p_target = 0.01;
  double c_miss = 10.0;
  double c_fa = 1.0;

  /// min(c_miss * p_target, c_fa * (1 - p_target)); throws if not positive.
  double Normalizer() const;
};

struct DetPoint {
  double p_fa = 0.0;
  double p_miss = 0.0;
  bool operator==(const DetPoint &) const = default;
};

// A trial is accepted when score >= threshold. Thresholds are -inf, the
// midpoints between consecutive distinct scores, and +inf, so the operating
// points run from (p_fa, p_miss) = (1, 0) to (0, 1) in increasing-threshold
// order. All functions throw a metric error unless both classes are present.

std::vector<DetPoint> DetPoints(const LabeledScores &scores);

/// Crossing of the miss and false-alarm curves, linearly interpolated
/// between the two operating points that bracket it. In [0, 1].
double ComputeEer(const LabeledScores &scores);
double EerFromDetPoints(const std::vector<DetPoint> &points);

/// Minimum normalized detection cost over all thresholds.
double ComputeMinDcf(const LabeledScores &scores, const DcfParams &params = {});
double MinDcfFromDetPoints(const std::vector<DetPoint> &points, const DcfParams &params);

}  // namespace spkback

#endif  // SPKBACK_METRICS_H_
