// include/spkback/linalg.h

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

#ifndef SPKBACK_LINALG_H_
#define SPKBACK_LINALG_H_

#include <string>

#include "spkback/types.h"

namespace spkback {

/// (M + M^t) / 2.
Matrix Symmetrize(const Matrix &m);

/// Inverse of a symmetric positive-definite matrix via Cholesky. Throws a
/// numerical error naming `what` if the factorization fails.
Matrix InversePd(const Matrix &m, const std::string &what = "matrix");

/// log det of a symmetric positive-definite matrix.
double LogDetPd(const Matrix &m, const std::string &what = "matrix");

/// Symmetric inverse square root S^{-1/2}. An eigenvalue below
/// rel_tol * max eigenvalue makes S singular: a numerical error reports the
/// numerical rank.
Matrix InverseSqrtPd(const Matrix &m, double rel_tol = 1e-10);

/// Raises eigenvalues of symmetric `m` below `floor` to `floor`. Returns true
/// if any eigenvalue was changed.
bool FloorEigenvalues(Matrix *m, double floor);

/// Rows of `data` are observations. Mean and covariance with divisor n.
void MeanAndCovariance(const Matrix &data, Vector *mean, Matrix *cov);

/// Stacks embedding vectors as rows.
Matrix StackRows(const std::vector<Embedding> &embeddings);

/// One-line dims for error messages: "3x4".
std::string DimString(const Matrix &m);

}  // namespace spkback

#endif  // SPKBACK_LINALG_H_
