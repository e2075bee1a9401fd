// src/plda.cc

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

#include "spkback/plda.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <omp.h>

#include "spkback/error.h"
#include "spkback/linalg.h"
#include "spkback/parallel.h"

namespace spkback {

namespace {

// Speakers per E-step block. Fixed so block boundaries, and therefore the
// summation order, never depend on the thread count.
constexpr int kEStepBlock = 64;
// Used when trace(gamma) itself collapses to zero.
constexpr double kAbsoluteGammaFloor = 1e-12;

void CheckDim(const PldaModel &model, const Vector &w, const char *what) {
  if (w.size() != model.Dim())
    throw Error(ErrorKind::kDimension, std::string(what) + " has dimension " +
                                           std::to_string(w.size()) +
                                           ", model dimension is " +
                                           std::to_string(model.Dim()));
}

bool FloorGamma(Matrix *gamma, double rel_floor) {
  const double d = static_cast<double>(gamma->rows());
  double floor = std::max(rel_floor * gamma->trace() / d, kAbsoluteGammaFloor);
  return FloorEigenvalues(gamma, floor);
}

// Quantities of the current model shared by every speaker in the E-step.
struct EStepContext {
  Matrix phi_t_gamma_inv;  // r x d
  Matrix precision;        // r x r, phi^t gamma^-1 phi

  explicit EStepContext(const PldaModel &model) {
    Eigen::LLT<Matrix> gamma_llt(model.gamma);
    if (gamma_llt.info() != Eigen::Success)
      throw Error(ErrorKind::kNumerical, "PLDA gamma is not positive definite");
    phi_t_gamma_inv = gamma_llt.solve(model.phi).transpose();
    precision = Symmetrize(phi_t_gamma_inv * model.phi);
  }
};

void AccumulateSpeaker(const Matrix &posterior_cov, double log_det_precision,
                       int count, const Vector &g, const Vector &f,
                       PldaEStepStats *stats) {
  Vector y = posterior_cov * g;
  stats->sum_fy.noalias() += f * y.transpose();
  stats->sum_yy.noalias() +=
      static_cast<double>(count) * (posterior_cov + y * y.transpose());
  stats->sum_quad += log_det_precision - g.dot(y);
}

PldaEStepStats ZeroStats(Eigen::Index d, Eigen::Index r) {
  PldaEStepStats s;
  s.sum_fy = Matrix::Zero(d, r);
  s.sum_yy = Matrix::Zero(r, r);
  return s;
}

}  // namespace

Vector Preprocessor::Whiten(const Vector &w) const {
  if (w.size() != Dim())
    throw Error(ErrorKind::kDimension,
                "vector of dimension " + std::to_string(w.size()) +
                    " given to preprocessor of dimension " + std::to_string(Dim()));
  return whitener * (w - mean);
}

Vector Preprocessor::Apply(const Vector &w) const {
  return LengthNormalize(Whiten(w));
}

std::vector<Embedding> Preprocessor::Apply(const std::vector<Embedding> &list) const {
  std::vector<Embedding> out;
  out.reserve(list.size());
  for (const Embedding &e : list) out.push_back(Apply(e));
  return out;
}

Preprocessor Preprocessor::Identity(Eigen::Index dim) {
  return {Vector::Zero(dim), Matrix::Identity(dim, dim)};
}

Preprocessor FitPreprocessor(const std::vector<Embedding> &data) {
  if (data.empty())
    throw Error(ErrorKind::kNumerical, "cannot fit a preprocessor on no data");
  const Eigen::Index d = data[0].Dim();
  if (static_cast<Eigen::Index>(data.size()) < d + 1)
    throw Error(ErrorKind::kNumerical,
                "covariance is singular: " + std::to_string(data.size()) +
                    " points give numerical rank at most " +
                    std::to_string(data.size() - 1) + " of " + std::to_string(d));
  Preprocessor pre;
  Matrix cov;
  MeanAndCovariance(StackRows(data), &pre.mean, &cov);
  pre.whitener = InverseSqrtPd(cov);
  return pre;
}

Vector LengthNormalize(const Vector &w) {
  double norm = w.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorKind::kDomain, "cannot length-normalize a zero vector");
  return w / norm;
}

Embedding EnrollAverage(const SpeakerGroup &sample, const Preprocessor &pre,
                        AverageMode mode) {
  if (sample.members.empty())
    throw Error(ErrorKind::kDomain,
                "empty enrollment sample for " + sample.speaker_id);
  Vector sum = Vector::Zero(pre.Dim());
  for (const Embedding &m : sample.members)
    sum += mode == AverageMode::kNormalizeMembers ? pre.Apply(m.vector)
                                                  : pre.Whiten(m.vector);
  return {sample.speaker_id,
          LengthNormalize(sum / static_cast<double>(sample.members.size()))};
}

void PldaModel::Validate() const {
  const Eigen::Index d = Dim();
  if (phi.rows() != d || gamma.rows() != d || gamma.cols() != d)
    throw Error(ErrorKind::kDimension, "PLDA model dims disagree: mu " +
                                           std::to_string(d) + ", phi " +
                                           DimString(phi) + ", gamma " +
                                           DimString(gamma));
  if (Rank() > d)
    throw Error(ErrorKind::kParameter, "PLDA rank exceeds dimension");
  Eigen::LLT<Matrix> llt(gamma);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "PLDA gamma is not positive definite");
}

PldaTrainingData PldaTrainingData::FromGroups(const std::vector<SpeakerGroup> &groups) {
  PldaTrainingData data;
  if (groups.empty()) return data;
  const Eigen::Index d = groups[0].Dim();
  Vector total = Vector::Zero(d);
  for (const SpeakerGroup &g : groups) {
    if (g.members.empty())
      throw Error(ErrorKind::kDomain, "speaker " + g.speaker_id + " has no members");
    for (const Embedding &e : g.members) {
      if (e.Dim() != d)
        throw Error(ErrorKind::kDimension,
                    "embedding " + e.id + " has dimension " +
                        std::to_string(e.Dim()) + ", expected " + std::to_string(d));
      total += e.vector;
      ++data.total_count;
    }
  }
  data.mu = total / static_cast<double>(data.total_count);
  data.scatter = Matrix::Zero(d, d);
  data.sums.resize(d, static_cast<Eigen::Index>(groups.size()));
  for (size_t s = 0; s < groups.size(); ++s) {
    Vector f = Vector::Zero(d);
    for (const Embedding &e : groups[s].members) {
      Vector c = e.vector - data.mu;
      data.scatter.noalias() += c * c.transpose();
      f += c;
    }
    data.sums.col(static_cast<Eigen::Index>(s)) = f;
    data.counts.push_back(groups[s].Size());
  }
  data.scatter = Symmetrize(data.scatter);
  return data;
}

void PldaEStepStats::Add(const PldaEStepStats &other) {
  sum_fy += other.sum_fy;
  sum_yy += other.sum_yy;
  sum_quad += other.sum_quad;
}

PldaEStepStats AccumulateEStepSerial(const PldaModel &model,
                                     const PldaTrainingData &data) {
  EStepContext ctx(model);
  const Eigen::Index r = model.Rank();
  PldaEStepStats stats = ZeroStats(model.Dim(), r);
  for (int s = 0; s < data.NumSpeakers(); ++s) {
    const int n = data.counts[s];
    Matrix precision =
        Matrix::Identity(r, r) + static_cast<double>(n) * ctx.precision;
    Matrix cov = InversePd(precision, "speaker posterior precision");
    double log_det = LogDetPd(precision);
    Vector f = data.sums.col(s);
    Vector g = ctx.phi_t_gamma_inv * f;
    AccumulateSpeaker(cov, log_det, n, g, f, &stats);
  }
  return stats;
}

PldaEStepStats AccumulateEStep(const PldaModel &model,
                               const PldaTrainingData &data) {
  EStepContext ctx(model);
  const Eigen::Index d = model.Dim(), r = model.Rank();

  // The posterior covariance depends on the speaker only through n_s.
  std::map<int, std::pair<Matrix, double>> by_count;
  for (int n : data.counts) {
    if (by_count.count(n)) continue;
    Matrix precision =
        Matrix::Identity(r, r) + static_cast<double>(n) * ctx.precision;
    by_count.emplace(n, std::make_pair(InversePd(precision, "speaker posterior precision"),
                                       LogDetPd(precision)));
  }

  const int num_speakers = data.NumSpeakers();
  const int num_blocks = (num_speakers + kEStepBlock - 1) / kEStepBlock;
  std::vector<PldaEStepStats> blocks(num_blocks, ZeroStats(d, r));
#pragma omp parallel for schedule(static) num_threads(NumThreads())
  for (int b = 0; b < num_blocks; ++b) {
    const int end = std::min(num_speakers, (b + 1) * kEStepBlock);
    for (int s = b * kEStepBlock; s < end; ++s) {
      const auto &[cov, log_det] = by_count.at(data.counts[s]);
      Vector f = data.sums.col(s);
      Vector g = ctx.phi_t_gamma_inv * f;
      AccumulateSpeaker(cov, log_det, data.counts[s], g, f, &blocks[b]);
    }
  }
  PldaEStepStats stats = ZeroStats(d, r);
  for (const PldaEStepStats &block : blocks) stats.Add(block);
  return stats;
}

double PldaLogLikelihood(const PldaModel &model, const PldaTrainingData &data,
                         const PldaEStepStats &estep) {
  const double n = static_cast<double>(data.total_count);
  const double d = static_cast<double>(model.Dim());
  Eigen::LLT<Matrix> gamma_llt(model.gamma);
  double log_det_gamma =
      2.0 * gamma_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double trace_term = gamma_llt.solve(data.scatter).trace();
  return -0.5 * (n * d * std::log(2.0 * std::numbers::pi) + n * log_det_gamma +
                 trace_term + estep.sum_quad);
}

PldaModel TrainPlda(const std::vector<SpeakerGroup> &groups,
                    const PldaTrainOptions &opts, PldaTrainStats *stats) {
  if (opts.iterations < 1)
    throw Error(ErrorKind::kParameter, "PLDA training needs at least 1 iteration");
  if (groups.size() < 2)
    throw Error(ErrorKind::kParameter, "PLDA training needs at least 2 speakers");
  PldaTrainingData data = PldaTrainingData::FromGroups(groups);
  const Eigen::Index d = data.mu.size();
  const Eigen::Index r = opts.rank;
  if (r < 1 || r > d)
    throw Error(ErrorKind::kParameter, "PLDA rank " + std::to_string(r) +
                                           " must be in [1, " + std::to_string(d) + "]");
  if (data.total_count < d + r)
    throw Error(ErrorKind::kParameter,
                "PLDA training needs at least dim + rank = " + std::to_string(d + r) +
                    " vectors, got " + std::to_string(data.total_count));

  PldaTrainStats local_stats;
  PldaTrainStats &st = stats ? *stats : local_stats;
  st = PldaTrainStats();
  const double n_total = static_cast<double>(data.total_count);

  // Initialization: between-speaker principal directions and within-speaker
  // scatter.
  PldaModel model;
  model.mu = data.mu;
  {
    Matrix between = Matrix::Zero(d, d);
    Matrix within = data.scatter;
    for (int s = 0; s < data.NumSpeakers(); ++s) {
      Vector f = data.sums.col(s);
      double n = static_cast<double>(data.counts[s]);
      between.noalias() += (f / n) * (f / n).transpose();
      within.noalias() -= f * f.transpose() / n;
    }
    between = Symmetrize(between / static_cast<double>(data.NumSpeakers()));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(between);
    // Eigenvalues come in increasing order.
    Vector top = eig.eigenvalues().tail(r).reverse().cwiseMax(0.0).cwiseSqrt();
    Matrix dirs = eig.eigenvectors().rightCols(r).rowwise().reverse();
    model.phi = dirs * top.asDiagonal();
    model.gamma = Symmetrize(within / n_total);
    if (FloorGamma(&model.gamma, opts.gamma_floor)) st.gamma_floor_engaged = true;
  }

  for (int it = 0; it < opts.iterations; ++it) {
    PldaEStepStats estep = AccumulateEStep(model, data);
    st.log_likelihood.push_back(PldaLogLikelihood(model, data, estep));

    Eigen::LLT<Matrix> yy_llt(estep.sum_yy);
    if (yy_llt.info() != Eigen::Success)
      throw Error(ErrorKind::kNumerical, "PLDA M-step: singular factor statistics");
    model.phi = yy_llt.solve(estep.sum_fy.transpose()).transpose();
    model.gamma =
        Symmetrize((data.scatter - model.phi * estep.sum_fy.transpose()) / n_total);
    if (FloorGamma(&model.gamma, opts.gamma_floor)) {
      if (!st.gamma_floor_engaged)
        Warn("PLDA residual covariance floored at iteration " + std::to_string(it));
      st.gamma_floor_engaged = true;
    }
  }
  st.log_likelihood.push_back(
      PldaLogLikelihood(model, data, AccumulateEStep(model, data)));
  return model;
}

Vector SpeakerFactor(const PldaModel &model, int count, const Vector &centered_sum) {
  CheckDim(model, centered_sum, "sample sum");
  const Eigen::Index r = model.Rank();
  Eigen::LLT<Matrix> gamma_llt(model.gamma);
  Matrix phi_t_gamma_inv = gamma_llt.solve(model.phi).transpose();
  Matrix precision = Matrix::Identity(r, r) +
                     static_cast<double>(count) * phi_t_gamma_inv * model.phi;
  return Symmetrize(precision).llt().solve(phi_t_gamma_inv * centered_sum);
}

Vector SpeakerFactor(const PldaModel &model, const SpeakerGroup &sample) {
  Vector sum = Vector::Zero(model.Dim());
  for (const Embedding &e : sample.members) {
    CheckDim(model, e.vector, "sample member");
    sum += e.vector - model.mu;
  }
  return SpeakerFactor(model, sample.Size(), sum);
}

double PldaLlr(const PldaModel &model, const Vector &w1, const Vector &w2) {
  CheckDim(model, w1, "w1");
  CheckDim(model, w2, "w2");
  // p(w2 | w1, same speaker) against p(w2): the 2 pi terms cancel.
  const Matrix between = model.BetweenCovariance();
  const Matrix total = between + model.gamma;
  Eigen::LLT<Matrix> total_llt(total);
  if (total_llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "PLDA total covariance is not positive definite");
  const Vector c1 = w1 - model.mu, c2 = w2 - model.mu;
  Vector cond_mean = between * total_llt.solve(c1);
  Matrix cond_cov = Symmetrize(total - between * total_llt.solve(between));
  Eigen::LLT<Matrix> cond_llt(cond_cov);
  if (cond_llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "PLDA conditional covariance is not positive definite");
  Vector diff = c2 - cond_mean;
  double log_det_cond =
      2.0 * cond_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double log_det_total =
      2.0 * total_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double given = -0.5 * (log_det_cond + diff.dot(cond_llt.solve(diff)));
  double without = -0.5 * (log_det_total + c2.dot(total_llt.solve(c2)));
  return given - without;
}

PldaModel InterpolatePlda(const PldaModel &in_domain, const PldaModel &out_domain,
                          double alpha, int rank) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw Error(ErrorKind::kParameter, "interpolation weight must be in [0, 1]");
  if (in_domain.Dim() != out_domain.Dim())
    throw Error(ErrorKind::kDimension,
                "cannot interpolate PLDA models of dimension " +
                    std::to_string(in_domain.Dim()) + " and " +
                    std::to_string(out_domain.Dim()));
  const Eigen::Index d = in_domain.Dim();
  const Eigen::Index r = rank > 0 ? rank : in_domain.Rank();
  if (r > d) throw Error(ErrorKind::kParameter, "interpolation rank exceeds dimension");

  Matrix between = Symmetrize(alpha * in_domain.BetweenCovariance() +
                              (1.0 - alpha) * out_domain.BetweenCovariance());
  Matrix within = Symmetrize(alpha * in_domain.gamma + (1.0 - alpha) * out_domain.gamma);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(between);
  Vector values = eig.eigenvalues().cwiseMax(0.0);
  double tail = values.head(d - r).sum();

  PldaModel out;
  out.mu = alpha * in_domain.mu + (1.0 - alpha) * out_domain.mu;
  out.phi = eig.eigenvectors().rightCols(r).rowwise().reverse() *
            values.tail(r).reverse().cwiseSqrt().asDiagonal();
  out.gamma = within;
  if (tail > 0.0) out.gamma.diagonal().array() += tail / static_cast<double>(d);
  return out;
}

}  // namespace spkback
