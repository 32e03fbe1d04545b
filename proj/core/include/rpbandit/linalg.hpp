//
// Copyright 2026 The rpbandit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef RPBANDIT_LINALG_HPP_
#define RPBANDIT_LINALG_HPP_

#include <Eigen/Dense>

namespace rpbandit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Eigendecomposition of a symmetric PSD matrix restricted to its numerical
// range. Eigenvalues at or below `floor * max(1, largest)` are treated as
// zero and their directions as outside the span.
struct SpanDecomposition {
  Matrix basis;       // d x r, orthonormal columns
  Vector eigenvalues; // r, all > floor

  int dim() const { return static_cast<int>(basis.rows()); }
  int rank() const { return static_cast<int>(basis.cols()); }

  // Norm of the component of `x` orthogonal to the span.
  double OrthogonalResidual(const Vector& x) const;
  // Coordinates of M^{+1/2}-type maps in the reduced basis.
  Vector InverseSqrtCoords(const Vector& x) const;  // diag(l^-1/2) V^T x
  Vector PseudoSolve(const Vector& x) const;        // M^+ x
};

inline constexpr double kGramEigenFloor = 1e-12;

SpanDecomposition DecomposeSymmetric(const Matrix& sym,
                                     double floor = kGramEigenFloor);

// Orthonormal basis of the column span of `columns`, found by column-pivoted
// Householder QR with relative threshold `tol`. Also returns the pivot order
// so callers can pick a maximal linearly independent subset.
struct ColumnSpan {
  Matrix basis;                  // d x r
  Eigen::VectorXi independent;   // r column indices, in pivot order
};

ColumnSpan RankRevealingSpan(const Matrix& columns, double tol = 1e-10);

struct Eigenpair {
  double value = 0.0;
  Vector vector;
  bool used_fallback = false;
};

// Leading eigenpair of a small symmetric PSD matrix. Power iteration with
// relative tolerance `tol` and at most `10 * p` steps; if it stagnates the
// full self-adjoint solver is used instead.
Eigenpair LeadingEigenpair(const Matrix& sym, double tol = 1e-8);

}  // namespace rpbandit

#endif  // RPBANDIT_LINALG_HPP_
