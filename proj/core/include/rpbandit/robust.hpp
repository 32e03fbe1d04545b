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

#ifndef RPBANDIT_ROBUST_HPP_
#define RPBANDIT_ROBUST_HPP_

#include <optional>
#include <span>
#include <vector>

#include "rpbandit/design.hpp"
#include "rpbandit/linalg.hpp"
#include "rpbandit/rng.hpp"

namespace rpbandit {

struct FilterDiagnostics {
  int removed_count = 0;
  double final_top_eigenvalue = 0.0;
  int iterations = 0;
  // Original indices of removed points, in removal order.
  std::vector<int> removed;
};

struct FilterResult {
  Vector mean;
  FilterDiagnostics diagnostics;
};

// Randomized spectral filter for robust mean estimation.
//
// `points` holds one sample per column. While the top eigenvalue mu of the
// empirical covariance is >= 4 * lambda, one point is removed with
// probability proportional to its squared projection on the top eigenvector,
// and the statistics are recomputed. Returns the mean of the survivors.
//
// Throws Error(kTooManyRemoved) once more than ceil(n / 2) points would have
// to go.
FilterResult SpectralFilter(const Matrix& points, double lambda, Stream& rng);

struct RobustOptions {
  // When set, rewards are clipped to [-clip, clip] before computing lambda.
  // Only lambda is affected; the filtered points use the raw rewards.
  std::optional<double> lambda_reward_clip;
};

struct RobustEstimate {
  Vector theta;
  FilterDiagnostics diagnostics;
  double lambda_used = 0.0;
  Matrix gram;
};

// Robust fixed-design least squares by reduction to mean estimation.
//
// With M = sum a_i a_i^T, the points X_i = M^{-1/2} a_i y_i are filtered with
// lambda = max_{a in query} ||a||^2_{M^-1} * sum y_i^2 / n and the result w
// is mapped back as theta = n M^{-1/2} w. All inverses act on the span of
// the design. `query` is the action set the estimate must answer for; every
// query action must lie in the span of the design (kSingularGram otherwise).
RobustEstimate RobustLeastSquares(const ActionSet& query,
                                  const std::vector<Vector>& actions,
                                  std::span<const double> rewards, Stream& rng,
                                  const RobustOptions& options = {});

// Ordinary least squares M^+ sum a_i y_i. Throws kSingularGram when a query
// action is outside the span of the design.
Vector VanillaLeastSquares(const ActionSet& query,
                           const std::vector<Vector>& actions,
                           std::span<const double> rewards);

// Gram matrix sum a_i a_i^T.
Matrix GramOf(const std::vector<Vector>& actions);

// Explicit confidence bound (diagnostic only):
//   mu ||y|| [ sqrt(n) (alpha + log(1/delta)/n)^{1/2} + sqrt(alpha log(1/delta)) ] + alpha
// with mu = max_{a in query} ||a||^2_{M^-1}.
double ConfidenceRadiusBound(const ActionSet& query,
                             const std::vector<Vector>& actions,
                             std::span<const double> rewards, double alpha,
                             double delta);

// Same bound from precomputed ingredients.
double ConfidenceRadiusFromParts(double max_weighted_norm_sq, double reward_norm,
                                 int n, double alpha, double delta);

}  // namespace rpbandit

#endif  // RPBANDIT_ROBUST_HPP_
