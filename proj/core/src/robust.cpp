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

#include "rpbandit/robust.hpp"

#include <algorithm>
#include <cmath>

#include "rpbandit/errors.hpp"

namespace rpbandit {

namespace {

// Covariance below this (relative to the largest squared point norm) is
// numerically zero: identical points after floating-point averaging.
constexpr double kZeroCovarianceRel = 1e-27;

void CheckRegressionInputs(const std::vector<Vector>& actions,
                           std::span<const double> rewards) {
  if (actions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "regression needs at least one sample");
  }
  if (actions.size() != rewards.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "actions and rewards differ in length (" +
                    std::to_string(actions.size()) + " vs " +
                    std::to_string(rewards.size()) + ")");
  }
}

SpanDecomposition QuerySpan(const ActionSet& query, const Matrix& gram) {
  if (query.dim() != gram.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "query and design dimensions differ");
  }
  SpanDecomposition span = DecomposeSymmetric(gram);
  if (span.rank() == 0) {
    throw Error(ErrorCode::kSingularGram, "design gram matrix is zero");
  }
  for (int j = 0; j < query.size(); ++j) {
    const Vector a = query.action(j);
    if (span.OrthogonalResidual(a) > kOutOfSpanTol * std::max(1.0, a.norm())) {
      throw Error(ErrorCode::kSingularGram,
                  "query action " + std::to_string(j) +
                      " is not spanned by the design");
    }
  }
  return span;
}

double MaxLeverage(const ActionSet& query, const SpanDecomposition& span) {
  double best = 0.0;
  for (int j = 0; j < query.size(); ++j) {
    best = std::max(best, span.InverseSqrtCoords(query.action(j)).squaredNorm());
  }
  return best;
}

}  // namespace

FilterResult SpectralFilter(const Matrix& points, double lambda, Stream& rng) {
  const Eigen::Index p = points.rows();
  const Eigen::Index n = points.cols();
  if (n < 1 || p < 1) {
    throw Error(ErrorCode::kInvalidArgument, "filter needs at least one point");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "filter threshold must be finite and >= 0");
  }
  if (!points.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "filter points must be finite");
  }

  const int cap = static_cast<int>((n + 1) / 2);
  const double zero_cov =
      kZeroCovarianceRel * std::max(1.0, points.colwise().squaredNorm().maxCoeff());

  FilterResult out;
  std::vector<int> alive(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) alive[i] = static_cast<int>(i);

  Matrix centered;
  Vector scores;
  while (true) {
    ++out.diagnostics.iterations;
    const auto m = static_cast<Eigen::Index>(alive.size());
    Vector mean;
    if (m == n) {
      mean = points.rowwise().mean();
    } else {
      mean = Vector::Zero(p);
      for (int i : alive) mean += points.col(i);
      mean /= static_cast<double>(m);
    }
    centered.resize(p, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      centered.col(j) = points.col(alive[j]) - mean;
    }
    const Matrix cov = centered * centered.transpose() / static_cast<double>(m);
    const Eigenpair top = LeadingEigenpair(cov);
    out.diagnostics.final_top_eigenvalue = top.value;

    if (top.value < 4.0 * lambda || top.value <= zero_cov) {
      out.mean = std::move(mean);
      return out;
    }

    scores = (top.vector.transpose() * centered).transpose().cwiseAbs2();
    const double total = scores.sum();
    if (!(total > 0.0)) {
      out.mean = std::move(mean);
      return out;
    }
    if (out.diagnostics.removed_count + 1 > cap) {
      throw Error(ErrorCode::kTooManyRemoved,
                  "spectral filter would remove more than " + std::to_string(cap) +
                      " of " + std::to_string(n) + " points (top eigenvalue " +
                      std::to_string(top.value) + ", 4*lambda " +
                      std::to_string(4.0 * lambda) + ")");
    }

    const double target = rng.NextOpenUnit() * total;
    double running = 0.0;
    Eigen::Index pick = m - 1;
    for (Eigen::Index j = 0; j < m; ++j) {
      running += scores(j);
      if (target < running) {
        pick = j;
        break;
      }
    }
    // Guard against landing on a zero-score point through rounding.
    while (scores(pick) == 0.0 && pick > 0) --pick;

    out.diagnostics.removed.push_back(alive[pick]);
    ++out.diagnostics.removed_count;
    alive.erase(alive.begin() + pick);
  }
}

Matrix GramOf(const std::vector<Vector>& actions) {
  if (actions.empty()) return Matrix();
  const Eigen::Index d = actions.front().size();
  Matrix gram = Matrix::Zero(d, d);
  for (const Vector& a : actions) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
  }
  return gram.selfadjointView<Eigen::Lower>();
}

RobustEstimate RobustLeastSquares(const ActionSet& query,
                                  const std::vector<Vector>& actions,
                                  std::span<const double> rewards, Stream& rng,
                                  const RobustOptions& options) {
  CheckRegressionInputs(actions, rewards);
  RobustEstimate out;
  out.gram = GramOf(actions);
  const SpanDecomposition span = QuerySpan(query, out.gram);
  const auto n = static_cast<Eigen::Index>(actions.size());

  double sum_sq = 0.0;
  for (double y : rewards) {
    const double v = options.lambda_reward_clip
                         ? std::clamp(y, -*options.lambda_reward_clip,
                                      *options.lambda_reward_clip)
                         : y;
    sum_sq += v * v;
  }
  out.lambda_used = MaxLeverage(query, span) * sum_sq / static_cast<double>(n);

  Matrix points(span.rank(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    points.col(i) = span.InverseSqrtCoords(actions[i]) * rewards[i];
  }
  FilterResult filtered = SpectralFilter(points, out.lambda_used, rng);
  out.diagnostics = std::move(filtered.diagnostics);
  out.theta = static_cast<double>(n) *
              (span.basis * filtered.mean.cwiseQuotient(span.eigenvalues.cwiseSqrt()));
  return out;
}

Vector VanillaLeastSquares(const ActionSet& query,
                           const std::vector<Vector>& actions,
                           std::span<const double> rewards) {
  CheckRegressionInputs(actions, rewards);
  const Matrix gram = GramOf(actions);
  const SpanDecomposition span = QuerySpan(query, gram);
  Vector moment = Vector::Zero(gram.rows());
  for (std::size_t i = 0; i < actions.size(); ++i) {
    moment += rewards[i] * actions[i];
  }
  return span.PseudoSolve(moment);
}

double ConfidenceRadiusFromParts(double max_weighted_norm_sq, double reward_norm,
                                 int n, double alpha, double delta) {
  if (!(alpha >= 0.0 && alpha < 0.25)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must lie in [0, 1/4)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be positive");
  const double log_inv = std::log(1.0 / delta);
  const double nn = static_cast<double>(n);
  return max_weighted_norm_sq * reward_norm *
             (std::sqrt(nn) * std::sqrt(alpha + log_inv / nn) +
              std::sqrt(alpha * log_inv)) +
         alpha;
}

double ConfidenceRadiusBound(const ActionSet& query,
                             const std::vector<Vector>& actions,
                             std::span<const double> rewards, double alpha,
                             double delta) {
  CheckRegressionInputs(actions, rewards);
  const Matrix gram = GramOf(actions);
  const SpanDecomposition span = QuerySpan(query, gram);
  double sum_sq = 0.0;
  for (double y : rewards) sum_sq += y * y;
  return ConfidenceRadiusFromParts(MaxLeverage(query, span), std::sqrt(sum_sq),
                                   static_cast<int>(actions.size()), alpha, delta);
}

}  // namespace rpbandit
