// src/calibration.cc

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

#include "spkback/calibration.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spkback/error.h"
#include "spkback/io.h"

namespace spkback {

namespace {

// log(1 + e^x) without overflow.
double Softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

struct Derivatives {
  double value = 0.0;
  Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
  Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

Derivatives Evaluate(const LabeledScores &scores, double a, double b,
                     const CalibrationOptions &opts, bool with_derivatives) {
  const double prior = opts.effective_prior;
  const double logit = std::log(prior / (1.0 - prior));
  Derivatives d;
  auto accumulate = [&](const std::vector<double> &values, double weight, bool target) {
    const double w = weight / static_cast<double>(values.size());
    for (double s : values) {
      double z = a * s + b + logit;
      // Target trials pay softplus(-z), nontargets softplus(z).
      d.value += w * (target ? Softplus(-z) : Softplus(z));
      if (!with_derivatives) continue;
      double p = Sigmoid(z);
      double residual = target ? p - 1.0 : p;
      double curvature = p * (1.0 - p);
      d.gradient(0) += w * residual * s;
      d.gradient(1) += w * residual;
      d.hessian(0, 0) += w * curvature * s * s;
      d.hessian(0, 1) += w * curvature * s;
      d.hessian(1, 1) += w * curvature;
    }
  };
  accumulate(scores.target, prior, true);
  accumulate(scores.nontarget, 1.0 - prior, false);
  d.value += 0.5 * opts.l2 * a * a;
  d.gradient(0) += opts.l2 * a;
  d.hessian(0, 0) += opts.l2;
  d.hessian(1, 0) = d.hessian(0, 1);
  return d;
}

}  // namespace

double CalibrationObjective(const LabeledScores &scores, double scale, double offset,
                            const CalibrationOptions &opts) {
  return Evaluate(scores, scale, offset, opts, false).value;
}

CalibrationModel FitCalibration(const LabeledScores &scores, const CalibrationOptions &opts,
                                CalibrationFitStats *stats) {
  if (scores.target.empty() || scores.nontarget.empty())
    throw Error(ErrorKind::kDomain, "calibration needs both target and nontarget trials");
  if (static_cast<int>(scores.target.size()) < opts.min_per_class ||
      static_cast<int>(scores.nontarget.size()) < opts.min_per_class)
    throw Error(ErrorKind::kDomain, "calibration needs at least " +
                                        std::to_string(opts.min_per_class) +
                                        " trials per class");
  if (!(opts.effective_prior > 0.0 && opts.effective_prior < 1.0))
    throw Error(ErrorKind::kParameter, "effective prior must be in (0, 1)");

  CalibrationFitStats local;
  CalibrationFitStats &st = stats ? *stats : local;
  st = CalibrationFitStats();

  Eigen::Vector2d theta(1.0, 0.0);
  Derivatives d = Evaluate(scores, theta(0), theta(1), opts, true);
  st.objective.push_back(d.value);
  int it = 0;
  for (; it < opts.max_iterations && d.gradient.norm() > opts.tolerance; ++it) {
    Eigen::Vector2d step = -d.hessian.ldlt().solve(d.gradient);
    if (!step.allFinite() || d.gradient.dot(step) >= 0.0) step = -d.gradient;
    const double slope = d.gradient.dot(step);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      Eigen::Vector2d candidate = theta + t * step;
      double value = Evaluate(scores, candidate(0), candidate(1), opts, false).value;
      if (value <= d.value + 1e-4 * t * slope || (ls > 40 && value <= d.value)) {
        theta = candidate;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    d = Evaluate(scores, theta(0), theta(1), opts, true);
    st.objective.push_back(d.value);
  }
  st.iterations = it;
  st.gradient_norm = d.gradient.norm();
  if (st.gradient_norm > opts.tolerance) {
    std::ostringstream msg;
    msg << "calibration did not converge after " << it << " iterations: |grad| = "
        << st.gradient_norm << ", scale = " << theta(0) << ", offset = " << theta(1);
    throw Error(ErrorKind::kNumerical, msg.str());
  }
  if (theta(0) <= 0.0)
    Warn("calibration scale " + FormatDouble(theta(0)) +
         " is not positive; scores carry no usable ranking");
  return {theta(0), theta(1), "all"};
}

CalibrationModel FitCalibration(const ScoreSet &scores, const TrialList &trials,
                                const CalibrationOptions &opts, CalibrationFitStats *stats) {
  return FitCalibration(JoinLabels(scores, trials), opts, stats);
}

ScoreSet ApplyCalibration(const CalibrationModel &model, const ScoreSet &scores) {
  ScoreSet out = scores;
  for (ScoreEntry &e : out.entries) e.score = model.Apply(e.score);
  return out;
}

void WriteCalibration(const std::string &path, const CalibrationModel &model) {
  WriteFileAtomically(path, [&](std::ostream &os) {
    os << "# spkback calibration v1: <condition> <scale> <offset>\n"
       << model.condition << ' ' << FormatDouble(model.scale) << ' '
       << FormatDouble(model.offset) << '\n';
  });
}

CalibrationModel ReadCalibration(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kIo, "cannot open " + path + " for reading");
  std::string line;
  int line_number = 0;
  while (std::getline(is, line)) {
    ++line_number;
    std::istringstream fields(line);
    std::string condition, scale, offset, extra;
    if (!(fields >> condition) || condition.front() == '#') continue;
    CalibrationModel model;
    model.condition = condition;
    if (!(fields >> scale >> offset) || (fields >> extra) ||
        !ParseDouble(scale, &model.scale) || !ParseDouble(offset, &model.offset))
      throw Error(ErrorKind::kParse, path + ":" + std::to_string(line_number) +
                                          ": expected <condition> <scale> <offset>");
    return model;
  }
  throw Error(ErrorKind::kParse, path + ": no calibration record");
}

}  // namespace spkback
