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

#include "rpbandit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace rpbandit {

double SpanDecomposition::OrthogonalResidual(const Vector& x) const {
  if (rank() == 0) return x.norm();
  const Vector coords = basis.transpose() * x;
  return (x - basis * coords).norm();
}

Vector SpanDecomposition::InverseSqrtCoords(const Vector& x) const {
  Vector coords = basis.transpose() * x;
  return coords.cwiseQuotient(eigenvalues.cwiseSqrt());
}

Vector SpanDecomposition::PseudoSolve(const Vector& x) const {
  const Vector coords = basis.transpose() * x;
  return basis * coords.cwiseQuotient(eigenvalues);
}

SpanDecomposition DecomposeSymmetric(const Matrix& sym, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  const Vector& values = solver.eigenvalues();
  const Matrix& vectors = solver.eigenvectors();
  const double largest = values.size() > 0 ? values.maxCoeff() : 0.0;
  const double cutoff = floor * std::max(1.0, largest);

  std::vector<int> keep;
  for (int i = static_cast<int>(values.size()) - 1; i >= 0; --i) {
    if (values(i) > cutoff) keep.push_back(i);
  }
  SpanDecomposition out;
  out.basis.resize(sym.rows(), static_cast<Eigen::Index>(keep.size()));
  out.eigenvalues.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.basis.col(static_cast<Eigen::Index>(j)) = vectors.col(keep[j]);
    out.eigenvalues(static_cast<Eigen::Index>(j)) = values(keep[j]);
  }
  return out;
}

ColumnSpan RankRevealingSpan(const Matrix& columns, double tol) {
  Eigen::ColPivHouseholderQR<Matrix> qr(columns);
  qr.setThreshold(tol);
  const auto rank = qr.rank();
  ColumnSpan out;
  const Matrix q = qr.householderQ();
  out.basis = q.leftCols(rank);
  out.independent.resize(rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    out.independent(j) = qr.colsPermutation().indices()(j);
  }
  return out;
}

Eigenpair LeadingEigenpair(const Matrix& sym, double tol) {
  const Eigen::Index p = sym.rows();
  Eigenpair out;
  if (p == 0) return out;
  if (p == 1) {
    out.value = sym(0, 0);
    out.vector = Vector::Ones(1);
    return out;
  }

  // Start from the column with the largest diagonal entry plus a uniform
  // component so the start is not orthogonal to the top eigenvector unless
  // the matrix is degenerate.
  Eigen::Index start = 0;
  sym.diagonal().maxCoeff(&start);
  Vector v = sym.col(start) + Vector::Constant(p, 1e-3 * sym.diagonal().maxCoeff());
  if (v.norm() == 0.0) {
    out.value = 0.0;
    out.vector = Vector::Unit(p, 0);
    return out;
  }
  v.normalize();

  double value = v.dot(sym * v);
  bool converged = false;
  const int max_steps = static_cast<int>(10 * p);
  for (int step = 0; step < max_steps; ++step) {
    Vector w = sym * v;
    const double norm = w.norm();
    if (norm == 0.0) break;
    w /= norm;
    const double next = w.dot(sym * w);
    const double scale = std::max(std::abs(next), 1e-300);
    v = std::move(w);
    if (std::abs(next - value) <= tol * scale &&
        (sym * v - next * v).norm() <= std::sqrt(tol) * scale) {
      value = next;
      converged = true;
      break;
    }
    value = next;
  }

  if (converged) {
    out.value = value;
    out.vector = v;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  out.value = solver.eigenvalues()(p - 1);
  out.vector = solver.eigenvectors().col(p - 1);
  out.used_fallback = true;
  return out;
}

}  // namespace rpbandit
