// src/fourcov.cc

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

#include "spkback/fourcov.h"

#include <algorithm>

#include <omp.h>

#include "spkback/error.h"
#include "spkback/linalg.h"
#include "spkback/parallel.h"

namespace spkback {

namespace {

const Embedding &Lookup(const std::map<std::string, size_t> &index,
                        const std::vector<Embedding> &list, const std::string &id,
                        const char *side) {
  auto it = index.find(id);
  if (it == index.end())
    throw Error(ErrorKind::kLookup, std::string("unknown ") + side + " id " + id);
  return list[it->second];
}

void CheckSide(const ScoringKernel &kernel, const Vector &w_e, const Vector &w_t) {
  if (w_e.size() != kernel.Dim1() || w_t.size() != kernel.Dim2())
    throw Error(ErrorKind::kDimension,
                "trial vectors of dimension " + std::to_string(w_e.size()) + "/" +
                    std::to_string(w_t.size()) + " for a kernel of dimension " +
                    std::to_string(kernel.Dim1()) + "/" + std::to_string(kernel.Dim2()));
}

// Enrollment-side terms of the quadratic form: cross = K12^t z1, self = z1^t K11 z1.
struct EnrollProjection {
  Vector cross;
  double self = 0.0;
};

EnrollProjection ProjectEnroll(const ScoringKernel &kernel, const Vector &w_e) {
  const Eigen::Index d1 = kernel.Dim1(), d2 = kernel.Dim2();
  Vector z1 = w_e - kernel.mu1;
  EnrollProjection p;
  p.cross = kernel.k.topRightCorner(d1, d2).transpose() * z1;
  p.self = z1.dot(kernel.k.topLeftCorner(d1, d1) * z1);
  return p;
}

double ProjectTest(const ScoringKernel &kernel, const Vector &z2) {
  const Eigen::Index d2 = kernel.Dim2();
  return z2.dot(kernel.k.bottomRightCorner(d2, d2) * z2);
}

double Combine(const ScoringKernel &kernel, const EnrollProjection &e,
               const Vector &z2, double test_self) {
  return -0.5 * (e.self + 2.0 * e.cross.dot(z2) + test_self) + kernel.c;
}

}  // namespace

void FourCovModel::Validate() const {
  plda1.Validate();
  plda2.Validate();
  if (a.rows() != plda2.Rank() || a.cols() != plda1.Rank())
    throw Error(ErrorKind::kDimension, "coupling A is " + DimString(a) +
                                           ", expected " + std::to_string(plda2.Rank()) +
                                           "x" + std::to_string(plda1.Rank()));
  if (m.rows() != plda2.Rank() || m.cols() != plda2.Rank())
    throw Error(ErrorKind::kDimension, "coupling M is " + DimString(m));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Symmetrize(m), Eigen::EigenvaluesOnly);
  double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale)
    throw Error(ErrorKind::kNumerical, "coupling M is not positive semi-definite");
}

FourCovModel MakeSymmetricModel(const PldaModel &plda) {
  const Eigen::Index r = plda.Rank();
  return {plda, plda, Matrix::Identity(r, r), Matrix::Zero(r, r)};
}

Matrix TargetCovariance(const FourCovModel &model) {
  const PldaModel &p1 = model.plda1, &p2 = model.plda2;
  const Eigen::Index d1 = p1.Dim(), d2 = p2.Dim();
  Matrix sigma(d1 + d2, d1 + d2);
  Matrix cross = p2.phi * model.a * p1.phi.transpose();  // d2 x d1
  sigma.topLeftCorner(d1, d1) = p1.TotalCovariance();
  sigma.bottomLeftCorner(d2, d1) = cross;
  sigma.topRightCorner(d1, d2) = cross.transpose();
  sigma.bottomRightCorner(d2, d2) =
      p2.phi * (model.a * model.a.transpose() + model.m) * p2.phi.transpose() + p2.gamma;
  return Symmetrize(sigma);
}

Matrix NontargetCovariance(const FourCovModel &model) {
  const Eigen::Index d1 = model.plda1.Dim(), d2 = model.plda2.Dim();
  Matrix sigma = Matrix::Zero(d1 + d2, d1 + d2);
  sigma.topLeftCorner(d1, d1) = model.plda1.TotalCovariance();
  sigma.bottomRightCorner(d2, d2) = model.plda2.TotalCovariance();
  return Symmetrize(sigma);
}

ScoringKernel BuildKernel(const FourCovModel &model) {
  model.Validate();
  Matrix tar = TargetCovariance(model), non = NontargetCovariance(model);
  Eigen::LLT<Matrix> tar_llt(tar), non_llt(non);
  if (tar_llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "same-speaker covariance is not positive definite");
  if (non_llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical,
                "different-speaker covariance is not positive definite");
  const Matrix eye = Matrix::Identity(tar.rows(), tar.cols());
  ScoringKernel kernel;
  kernel.mu1 = model.plda1.mu;
  kernel.mu2 = model.plda2.mu;
  kernel.k = Symmetrize(tar_llt.solve(eye) - non_llt.solve(eye));
  double log_det_tar =
      2.0 * tar_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double log_det_non =
      2.0 * non_llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  kernel.c = -0.5 * (log_det_tar - log_det_non);
  return kernel;
}

void FitCouplingFromFactors(const Matrix &y1, const Matrix &y2, Matrix *a, Matrix *m) {
  if (y1.rows() != y2.rows())
    throw Error(ErrorKind::kDimension, "factor matrices have " +
                                           std::to_string(y1.rows()) + " and " +
                                           std::to_string(y2.rows()) + " speakers");
  const Eigen::Index num_speakers = y1.rows(), r1 = y1.cols();
  if (num_speakers < r1 + 1)
    throw Error(ErrorKind::kNumerical,
                "coupling needs at least rank + 1 = " + std::to_string(r1 + 1) +
                    " speakers, got " + std::to_string(num_speakers));
  Eigen::ColPivHouseholderQR<Matrix> qr(y1);
  qr.setThreshold(1e-10);
  if (qr.rank() < r1)
    throw Error(ErrorKind::kNumerical,
                "Y1^t Y1 is rank-deficient (rank " + std::to_string(qr.rank()) + " of " +
                    std::to_string(r1) + "); use more speakers or a lower rank");
  *a = qr.solve(y2).transpose();  // r2 x r1
  Matrix residual = y2 - y1 * a->transpose();
  Vector mean;
  MeanAndCovariance(residual, &mean, m);
}

FourCovModel FitCoupling(const PldaModel &plda1, const PldaModel &plda2,
                         const std::vector<std::pair<SpeakerGroup, SpeakerGroup>> &pairs) {
  const Eigen::Index n = static_cast<Eigen::Index>(pairs.size());
  Matrix y1(n, plda1.Rank()), y2(n, plda2.Rank());
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto &[g1, g2] = pairs[static_cast<size_t>(s)];
    if (g1.members.empty() || g2.members.empty())
      throw Error(ErrorKind::kDomain, "speaker " + g1.speaker_id +
                                          " lacks data on one side of the coupling");
    y1.row(s) = SpeakerFactor(plda1, g1).transpose();
    y2.row(s) = SpeakerFactor(plda2, g2).transpose();
  }
  FourCovModel model{plda1, plda2, Matrix(), Matrix()};
  FitCouplingFromFactors(y1, y2, &model.a, &model.m);
  return model;
}

double ScoreTrial(const ScoringKernel &kernel, const Vector &w_e, const Vector &w_t) {
  CheckSide(kernel, w_e, w_t);
  EnrollProjection e = ProjectEnroll(kernel, w_e);
  Vector z2 = w_t - kernel.mu2;
  return Combine(kernel, e, z2, ProjectTest(kernel, z2));
}

ScoreSet ScoreBatchReference(const ScoringKernel &kernel,
                             const std::vector<Embedding> &enrolls,
                             const std::vector<Embedding> &tests,
                             const TrialList &trials) {
  auto enroll_index = IndexById(enrolls), test_index = IndexById(tests);
  ScoreSet out;
  out.entries.reserve(trials.Size());
  for (const Trial &t : trials.entries) {
    const Embedding &e = Lookup(enroll_index, enrolls, t.enroll_id, "enrollment");
    const Embedding &x = Lookup(test_index, tests, t.test_id, "test");
    out.entries.push_back({t.enroll_id, t.test_id, ScoreTrial(kernel, e.vector, x.vector)});
  }
  return out;
}

ScoreSet ScoreBatch(const ScoringKernel &kernel, const std::vector<Embedding> &enrolls,
                    const std::vector<Embedding> &tests, const TrialList &trials) {
  auto enroll_index = IndexById(enrolls), test_index = IndexById(tests);
  const long n = static_cast<long>(trials.Size());
  std::vector<size_t> enroll_of(n), test_of(n);
  for (long i = 0; i < n; ++i) {
    const Trial &t = trials.entries[i];
    auto ei = enroll_index.find(t.enroll_id);
    if (ei == enroll_index.end())
      throw Error(ErrorKind::kLookup, "unknown enrollment id " + t.enroll_id);
    auto ti = test_index.find(t.test_id);
    if (ti == test_index.end()) throw Error(ErrorKind::kLookup, "unknown test id " + t.test_id);
    enroll_of[i] = ei->second;
    test_of[i] = ti->second;
  }
  for (const Embedding &e : enrolls)
    if (e.Dim() != kernel.Dim1()) CheckSide(kernel, e.vector, kernel.mu2);
  for (const Embedding &x : tests)
    if (x.Dim() != kernel.Dim2()) CheckSide(kernel, kernel.mu1, x.vector);

  const long ne = static_cast<long>(enrolls.size()), nt = static_cast<long>(tests.size());
  std::vector<EnrollProjection> enroll_proj(ne);
  std::vector<Vector> test_centered(nt);
  std::vector<double> test_self(nt);
  const int threads = NumThreads();
#pragma omp parallel num_threads(threads)
  {
#pragma omp for schedule(static) nowait
    for (long i = 0; i < ne; ++i) enroll_proj[i] = ProjectEnroll(kernel, enrolls[i].vector);
#pragma omp for schedule(static)
    for (long j = 0; j < nt; ++j) {
      test_centered[j] = tests[j].vector - kernel.mu2;
      test_self[j] = ProjectTest(kernel, test_centered[j]);
    }
  }

  ScoreSet out;
  out.entries.resize(n);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    const Trial &t = trials.entries[i];
    out.entries[i] = {t.enroll_id, t.test_id,
                      Combine(kernel, enroll_proj[enroll_of[i]], test_centered[test_of[i]],
                              test_self[test_of[i]])};
  }
  return out;
}

Matrix ScoreMatrix(const ScoringKernel &kernel, const std::vector<Embedding> &enrolls,
                   const std::vector<Embedding> &tests) {
  const long ne = static_cast<long>(enrolls.size());
  const long nt = static_cast<long>(tests.size());
  // Exceptions must not escape OpenMP regions; validate up front.
  for (const Embedding &e : enrolls)
    if (e.Dim() != kernel.Dim1()) CheckSide(kernel, e.vector, kernel.mu2);
  for (const Embedding &x : tests)
    if (x.Dim() != kernel.Dim2()) CheckSide(kernel, kernel.mu1, x.vector);

  std::vector<EnrollProjection> enroll_proj(ne);
  std::vector<Vector> test_centered(nt);
  std::vector<double> test_self(nt);
  Matrix scores(ne, nt);
  const int threads = NumThreads();
#pragma omp parallel num_threads(threads)
  {
#pragma omp for schedule(static) nowait
    for (long i = 0; i < ne; ++i) enroll_proj[i] = ProjectEnroll(kernel, enrolls[i].vector);
#pragma omp for schedule(static)
    for (long j = 0; j < nt; ++j) {
      test_centered[j] = tests[j].vector - kernel.mu2;
      test_self[j] = ProjectTest(kernel, test_centered[j]);
    }
    // Same per-entry arithmetic as ScoreTrial, so every entry is bit-identical
    // to scoring that pair alone.
#pragma omp for schedule(static)
    for (long i = 0; i < ne; ++i)
      for (long j = 0; j < nt; ++j)
        scores(i, j) = Combine(kernel, enroll_proj[i], test_centered[j], test_self[j]);
  }
  return scores;
}

}  // namespace spkback
