// src/metrics.cc

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

#include "spkback/metrics.h"

#include <algorithm>
#include <limits>

#include "spkback/error.h"

namespace spkback {

namespace {

void CheckClasses(const LabeledScores &scores) {
  if (scores.target.empty() || scores.nontarget.empty())
    throw Error(ErrorKind::kMetric, "metric needs both target and nontarget scores (got " +
                                        std::to_string(scores.target.size()) + " / " +
                                        std::to_string(scores.nontarget.size()) + ")");
}

}  // namespace

double DcfParams::Normalizer() const {
  if (!(p_target > 0.0 && p_target < 1.0) || !(c_miss > 0.0) || !(c_fa > 0.0))
    throw Error(ErrorKind::kParameter, "DCF parameters out of range");
  return std::min(c_miss * p_target, c_fa * (1.0 - p_target));
}

std::vector<DetPoint> DetPoints(const LabeledScores &scores) {
  CheckClasses(scores);
  std::vector<double> tgt = scores.target, non = scores.nontarget;
  std::sort(tgt.begin(), tgt.end());
  std::sort(non.begin(), non.end());
  const double nt = static_cast<double>(tgt.size()), nn = static_cast<double>(non.size());

  // Sweep the distinct scores in increasing order. After passing value v,
  // every trial with score <= v is rejected.
  std::vector<DetPoint> points;
  points.reserve(tgt.size() + non.size() + 1);
  points.push_back({1.0, 0.0});
  size_t i = 0, j = 0;
  while (i < tgt.size() || j < non.size()) {
    double v = std::min(i < tgt.size() ? tgt[i] : std::numeric_limits<double>::infinity(),
                        j < non.size() ? non[j] : std::numeric_limits<double>::infinity());
    while (i < tgt.size() && tgt[i] == v) ++i;
    while (j < non.size() && non[j] == v) ++j;
    points.push_back({static_cast<double>(non.size() - j) / nn,
                      static_cast<double>(i) / nt});
  }
  return points;
}

double EerFromDetPoints(const std::vector<DetPoint> &points) {
  for (size_t k = 0; k + 1 < points.size(); ++k) {
    const DetPoint &lo = points[k], &hi = points[k + 1];
    double d_lo = lo.p_miss - lo.p_fa, d_hi = hi.p_miss - hi.p_fa;
    if (d_lo == 0.0) return lo.p_miss;
    if (d_lo < 0.0 && d_hi >= 0.0) {
      double t = -d_lo / (d_hi - d_lo);
      return lo.p_miss + t * (hi.p_miss - lo.p_miss);
    }
  }
  return points.back().p_miss;
}

double MinDcfFromDetPoints(const std::vector<DetPoint> &points, const DcfParams &params) {
  const double norm = params.Normalizer();
  double best = std::numeric_limits<double>::infinity();
  for (const DetPoint &p : points) {
    double cost = params.c_miss * params.p_target * p.p_miss +
                  params.c_fa * (1.0 - params.p_target) * p.p_fa;
    best = std::min(best, cost / norm);
  }
  return best;
}

double ComputeEer(const LabeledScores &scores) { return EerFromDetPoints(DetPoints(scores)); }

double ComputeMinDcf(const LabeledScores &scores, const DcfParams &params) {
  return MinDcfFromDetPoints(DetPoints(scores), params);
}

}  // namespace spkback
