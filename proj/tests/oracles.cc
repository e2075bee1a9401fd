// tests/oracles.cc

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

#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spkback {
namespace oracle {

double GaussianLogPdf(const Matrix &cov, const Vector &x) {
  Eigen::FullPivLU<Matrix> lu(cov);
  double logdet = std::log(std::abs(lu.determinant()));
  double quad = x.dot(lu.solve(x));
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * M_PI) + logdet + quad);
}

Matrix TargetCovariance(const FourCovModel &m) {
  const Matrix &p1 = m.plda1.phi, &p2 = m.plda2.phi;
  const Eigen::Index d1 = p1.rows(), d2 = p2.rows();
  Matrix out(d1 + d2, d1 + d2);
  out.block(0, 0, d1, d1) = p1 * p1.transpose() + m.plda1.gamma;
  out.block(d1, 0, d2, d1) = p2 * m.a * p1.transpose();
  out.block(0, d1, d1, d2) = p1 * m.a.transpose() * p2.transpose();
  out.block(d1, d1, d2, d2) =
      p2 * m.a * m.a.transpose() * p2.transpose() + p2 * m.m * p2.transpose() + m.plda2.gamma;
  return out;
}

Matrix NontargetCovariance(const FourCovModel &m) {
  const Eigen::Index d1 = m.plda1.Dim(), d2 = m.plda2.Dim();
  Matrix out = Matrix::Zero(d1 + d2, d1 + d2);
  out.block(0, 0, d1, d1) = m.plda1.phi * m.plda1.phi.transpose() + m.plda1.gamma;
  out.block(d1, d1, d2, d2) = m.plda2.phi * m.plda2.phi.transpose() + m.plda2.gamma;
  return out;
}

double FourCovLlr(const FourCovModel &model, const Vector &w1, const Vector &w2) {
  Vector z(w1.size() + w2.size());
  z << w1 - model.plda1.mu, w2 - model.plda2.mu;
  return GaussianLogPdf(oracle::TargetCovariance(model), z) -
         GaussianLogPdf(oracle::NontargetCovariance(model), z);
}

Matrix RandomMatrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

Vector RandomVector(Eigen::Index d, std::mt19937_64 &rng, double scale) {
  return RandomMatrix(d, 1, rng, scale).col(0);
}

Matrix RandomSpd(Eigen::Index d, std::mt19937_64 &rng, double floor) {
  Matrix b = RandomMatrix(d, d, rng, 1.0 / std::sqrt(static_cast<double>(d)));
  Matrix s = b * b.transpose() + floor * Matrix::Identity(d, d);
  return 0.5 * (s + s.transpose());
}

PldaModel RandomPlda(Eigen::Index d, Eigen::Index r, std::mt19937_64 &rng) {
  return {RandomVector(d, rng), RandomMatrix(d, r, rng, 0.7), RandomSpd(d, rng)};
}

FourCovModel RandomFourCov(Eigen::Index d1, Eigen::Index d2, Eigen::Index r1, Eigen::Index r2,
                           std::mt19937_64 &rng) {
  FourCovModel m;
  m.plda1 = RandomPlda(d1, r1, rng);
  m.plda2 = RandomPlda(d2, r2, rng);
  m.a = RandomMatrix(r2, r1, rng, 0.5);
  Matrix c = RandomMatrix(r2, std::max<Eigen::Index>(1, r2 - 1), rng, 0.3);
  m.m = c * c.transpose();
  return m;
}

std::vector<DetPoint> BruteDetPoints(const std::vector<double> &target,
                                     const std::vector<double> &nontarget) {
  std::vector<double> all = target;
  all.insert(all.end(), nontarget.begin(), nontarget.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> thresholds{-std::numeric_limits<double>::infinity()};
  for (size_t i = 0; i + 1 < all.size(); ++i) thresholds.push_back(0.5 * (all[i] + all[i + 1]));
  thresholds.push_back(std::numeric_limits<double>::infinity());

  std::vector<DetPoint> out;
  for (double th : thresholds) {
    size_t miss = 0, fa = 0;
    for (double s : target)
      if (!(s >= th)) ++miss;
    for (double s : nontarget)
      if (s >= th) ++fa;
    out.push_back({static_cast<double>(fa) / static_cast<double>(nontarget.size()),
                   static_cast<double>(miss) / static_cast<double>(target.size())});
  }
  return out;
}

double BruteEer(const std::vector<double> &target, const std::vector<double> &nontarget) {
  std::vector<DetPoint> p = BruteDetPoints(target, nontarget);
  for (size_t k = 0; k + 1 < p.size(); ++k) {
    double a = p[k].p_miss - p[k].p_fa, b = p[k + 1].p_miss - p[k + 1].p_fa;
    if (a == 0.0) return p[k].p_miss;
    if (a < 0.0 && b >= 0.0) {
      double t = a / (a - b);
      return p[k].p_miss + t * (p[k + 1].p_miss - p[k].p_miss);
    }
  }
  return p.back().p_miss;
}

double BruteMinDcf(const std::vector<double> &target, const std::vector<double> &nontarget,
                   const DcfParams &params) {
  double norm = std::min(params.c_miss * params.p_target, params.c_fa * (1.0 - params.p_target));
  double best = std::numeric_limits<double>::infinity();
  for (const DetPoint &p : BruteDetPoints(target, nontarget))
    best = std::min(best, (params.c_miss * params.p_target * p.p_miss +
                           params.c_fa * (1.0 - params.p_target) * p.p_fa) /
                              norm);
  return best;
}

CohortStats SortSliceStats(std::vector<double> scores, std::optional<int> top_k) {
  std::sort(scores.begin(), scores.end(), std::greater<double>());
  size_t keep = scores.size();
  if (top_k && static_cast<size_t>(*top_k) < scores.size()) {
    keep = static_cast<size_t>(*top_k);
    while (keep < scores.size() && scores[keep] == scores[keep - 1]) ++keep;
  }
  double mean = 0.0;
  for (size_t i = 0; i < keep; ++i) mean += scores[i];
  mean /= static_cast<double>(keep);
  double var = 0.0;
  for (size_t i = 0; i < keep; ++i) var += (scores[i] - mean) * (scores[i] - mean);
  return {mean, std::sqrt(var / static_cast<double>(keep))};
}

std::vector<SpeakerGroup> RandomGroups(int speakers, int per_speaker, Eigen::Index d,
                                       std::mt19937_64 &rng) {
  std::vector<SpeakerGroup> out;
  for (int s = 0; s < speakers; ++s) {
    SpeakerGroup g{"s" + std::to_string(s), {}};
    Vector center = RandomVector(d, rng);
    for (int k = 0; k < per_speaker; ++k)
      g.members.push_back({g.speaker_id + "-" + std::to_string(k),
                           center + RandomVector(d, rng, 0.5)});
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace oracle
}  // namespace spkback
