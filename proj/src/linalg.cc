// src/linalg.cc

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

#include "spkback/linalg.h"

#include <cmath>

#include "spkback/error.h"

namespace spkback {

Matrix Symmetrize(const Matrix &m) { return 0.5 * (m + m.transpose()); }

Matrix InversePd(const Matrix &m, const std::string &what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, what + " is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return Symmetrize(inv);
}

double LogDetPd(const Matrix &m, const std::string &what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, what + " is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Matrix InverseSqrtPd(const Matrix &m, double rel_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Symmetrize(m));
  if (eig.info() != Eigen::Success)
    throw Error(ErrorKind::kNumerical, "eigendecomposition failed");
  const Vector &values = eig.eigenvalues();
  double max_value = values.size() ? values.maxCoeff() : 0.0;
  double threshold = rel_tol * std::max(max_value, 0.0);
  Eigen::Index rank = (values.array() > threshold).count();
  if (rank < values.size() || max_value <= 0.0)
    throw Error(ErrorKind::kNumerical,
                "covariance is singular: numerical rank " + std::to_string(rank) +
                    " of " + std::to_string(values.size()));
  Vector inv_sqrt = values.array().rsqrt();
  return Symmetrize(eig.eigenvectors() * inv_sqrt.asDiagonal() *
                    eig.eigenvectors().transpose());
}

bool FloorEigenvalues(Matrix *m, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Symmetrize(*m));
  Vector values = eig.eigenvalues();
  bool changed = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values(i) >= floor)) {
      values(i) = floor;
      changed = true;
    }
  }
  if (changed)
    *m = Symmetrize(eig.eigenvectors() * values.asDiagonal() *
                    eig.eigenvectors().transpose());
  return changed;
}

void MeanAndCovariance(const Matrix &data, Vector *mean, Matrix *cov) {
  const double n = static_cast<double>(data.rows());
  *mean = data.colwise().mean().transpose();
  Matrix centered = data.rowwise() - mean->transpose();
  *cov = Symmetrize(centered.transpose() * centered / n);
}

Matrix StackRows(const std::vector<Embedding> &embeddings) {
  if (embeddings.empty()) return Matrix();
  Matrix out(static_cast<Eigen::Index>(embeddings.size()), embeddings[0].Dim());
  for (size_t i = 0; i < embeddings.size(); ++i) {
    if (embeddings[i].Dim() != out.cols())
      throw Error(ErrorKind::kDimension,
                  "embedding " + embeddings[i].id + " has dimension " +
                      std::to_string(embeddings[i].Dim()) + ", expected " +
                      std::to_string(out.cols()));
    out.row(static_cast<Eigen::Index>(i)) = embeddings[i].vector.transpose();
  }
  return out;
}

std::string DimString(const Matrix &m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace spkback
