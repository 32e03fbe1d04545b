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

#include "rpbandit/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rpbandit/errors.hpp"

namespace rpbandit {

ActionSet::ActionSet(Matrix actions) : actions_(std::move(actions)) {
  if (actions_.cols() < 1 || actions_.rows() < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "action set needs at least one action of dimension >= 1");
  }
  if (!actions_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "action set has non-finite entries");
  }
  for (Eigen::Index j = 0; j < actions_.cols(); ++j) {
    const double norm = actions_.col(j).norm();
    if (norm > 1.0 + kActionNormSlack) {
      throw Error(ErrorCode::kInvalidArgument,
                  "action " + std::to_string(j) + " has norm " +
                      std::to_string(norm) + " > 1");
    }
  }
}

ActionSet ActionSet::FromRows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty action list");
  }
  const std::size_t dim = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != dim) {
      throw Error(ErrorCode::kInvalidArgument,
                  "action " + std::to_string(j) + " has dimension " +
                      std::to_string(rows[j].size()) + ", expected " +
                      std::to_string(dim));
    }
    for (std::size_t i = 0; i < dim; ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[j][i];
    }
  }
  return ActionSet(std::move(m));
}

ActionSet ActionSet::Subset(std::span<const int> indices) const {
  Matrix m(actions_.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    m.col(static_cast<Eigen::Index>(j)) = actions_.col(indices[j]);
  }
  return ActionSet(std::move(m));
}

std::vector<std::vector<double>> ActionSet::ToRows() const {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(size()));
  for (int j = 0; j < size(); ++j) {
    rows[j].assign(actions_.col(j).data(), actions_.col(j).data() + dim());
  }
  return rows;
}

std::vector<int> Design::Support() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

int Design::SupportSize() const {
  return static_cast<int>(
      std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

double SupportBound(int effective_dim, double support_constant) {
  const double r = std::max(1, effective_dim);
  const double loglog = r > 1.0 ? std::log(std::log(r)) : 0.0;
  return support_constant * r * std::max(1.0, loglog);
}

namespace {

// Weighted norms ||b_a||^2_{M^-1} for every column of `coords` (r x K).
Vector LeverageScores(const Matrix& coords, const std::vector<double>& w) {
  const Eigen::Index r = coords.rows();
  Matrix gram = Matrix::Zero(r, r);
  for (std::size_t a = 0; a < w.size(); ++a) {
    if (w[a] > 0.0) {
      gram.selfadjointView<Eigen::Lower>().rankUpdate(
          coords.col(static_cast<Eigen::Index>(a)), w[a]);
    }
  }
  Eigen::LLT<Matrix> llt(gram.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success) {
    return Vector::Constant(coords.cols(), std::numeric_limits<double>::infinity());
  }
  const Matrix half = llt.matrixL().solve(coords);
  return half.colwise().squaredNorm().transpose();
}

// argmax with lowest-index tie-breaking.
Eigen::Index ArgMax(const Vector& g) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < g.size(); ++i) {
    if (g(i) > g(best)) best = i;
  }
  return best;
}

// Frank-Wolfe with away steps over the candidates flagged in `allowed`.
// Returns the number of iterations used; stops once the max leverage over
// allowed candidates is within (1 + tol) r.
int FrankWolfe(const Matrix& coords, const std::vector<bool>& allowed,
               double tol, int max_iters, std::vector<double>& w) {
  const double r = static_cast<double>(coords.rows());
  const std::size_t k = w.size();
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    Vector g = LeverageScores(coords, w);
    for (std::size_t a = 0; a < k; ++a) {
      if (!allowed[a]) g(static_cast<Eigen::Index>(a)) = -1.0;
    }
    const Eigen::Index toward = ArgMax(g);
    const double g_max = g(toward);
    if (g_max <= (1.0 + tol) * r || !std::isfinite(g_max)) break;

    Eigen::Index away = -1;
    for (std::size_t a = 0; a < k; ++a) {
      if (w[a] <= 0.0) continue;
      const auto ia = static_cast<Eigen::Index>(a);
      if (away < 0 || g(ia) < g(away)) away = ia;
    }

    const double toward_gap = g_max - r;
    const double away_gap = away >= 0 ? r - g(away) : 0.0;
    if (away >= 0 && away_gap > toward_gap && w[away] < 1.0) {
      const double g_i = g(away);
      const double s_max = w[away] / (1.0 - w[away]);
      double s = s_max;
      if (g_i > 1.0) s = std::min(s_max, (r - g_i) / (r * (g_i - 1.0)));
      for (double& x : w) x *= (1.0 + s);
      if (s >= s_max) {
        w[away] = 0.0;
      } else {
        w[away] -= s;
      }
    } else {
      const double t = (g_max / r - 1.0) / (g_max - 1.0);
      for (double& x : w) x *= (1.0 - t);
      w[toward] += t;
    }
  }
  return iter;
}

void Normalize(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
}

}  // namespace

Design ComputeDesign(const ActionSet& actions, const DesignOptions& options) {
  if (!(options.tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "design tolerance must be positive");
  }
  if (options.max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be positive");
  }
  const int num = actions.size();
  const ColumnSpan span = RankRevealingSpan(actions.matrix());
  const int rank = static_cast<int>(span.basis.cols());

  Design design;
  design.effective_dim = rank;
  design.weights.assign(static_cast<std::size_t>(num), 0.0);
  if (rank == 0) {
    // Only zero actions: every design is trivially optimal.
    design.weights[0] = 1.0;
    design.gram = Matrix::Zero(actions.dim(), actions.dim());
    return design;
  }

  const Matrix coords = span.basis.transpose() * actions.matrix();
  for (Eigen::Index j = 0; j < span.independent.size(); ++j) {
    design.weights[span.independent(j)] = 1.0 / rank;
  }

  std::vector<bool> allowed(static_cast<std::size_t>(num), true);
  design.iterations =
      FrankWolfe(coords, allowed, options.tol, options.max_iters, design.weights);

  const double prune = 1e-6 / num;
  for (double& x : design.weights) {
    if (x < prune) x = 0.0;
  }
  Normalize(design.weights);

  // Trim the support down to the bound: drop the lightest action and
  // re-optimize over what is left.
  const double bound = SupportBound(rank, options.support_constant);
  while (design.SupportSize() > bound && design.SupportSize() > rank) {
    std::size_t lightest = 0;
    double lightest_w = 2.0;
    for (std::size_t a = 0; a < design.weights.size(); ++a) {
      if (design.weights[a] > 0.0 && design.weights[a] < lightest_w) {
        lightest = a;
        lightest_w = design.weights[a];
      }
    }
    design.weights[lightest] = 0.0;
    Normalize(design.weights);
    for (std::size_t a = 0; a < allowed.size(); ++a) {
      allowed[a] = design.weights[a] > 0.0;
    }
    design.iterations += FrankWolfe(coords, allowed, options.tol,
                                    options.max_iters, design.weights);
    for (double& x : design.weights) {
      if (x < prune) x = 0.0;
    }
    Normalize(design.weights);
  }

  if (design.SupportSize() > bound) {
    throw Error(ErrorCode::kFailsToConverge,
                "support of " + std::to_string(design.SupportSize()) +
                    " actions cannot be trimmed to the bound " + std::to_string(bound));
  }

  const Vector g = LeverageScores(coords, design.weights);
  design.gvalue = g.maxCoeff();

  design.gram = Matrix::Zero(actions.dim(), actions.dim());
  for (int a = 0; a < num; ++a) {
    if (design.weights[a] > 0.0) {
      design.gram.noalias() +=
          design.weights[a] * actions.action(a) * actions.action(a).transpose();
    }
  }

  if (!(design.gvalue <= 2.0 * rank)) {
    throw Error(ErrorCode::kFailsToConverge,
                "design gvalue " + std::to_string(design.gvalue) + " exceeds 2 * " +
                    std::to_string(rank) + " after " +
                    std::to_string(design.iterations) + " iterations");
  }
  return design;
}

double WeightedNormSq(const Vector& a, const Matrix& gram) {
  if (a.size() != gram.rows() || gram.rows() != gram.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "dimension mismatch in WeightedNormSq");
  }
  const SpanDecomposition span = DecomposeSymmetric(gram);
  if (span.OrthogonalResidual(a) > kOutOfSpanTol * std::max(1.0, a.norm())) {
    throw Error(ErrorCode::kOutOfSpan, "vector has a component outside the gram span");
  }
  return span.InverseSqrtCoords(a).squaredNorm();
}

double MaxWeightedNormSq(const ActionSet& actions, const Matrix& gram) {
  const SpanDecomposition span = DecomposeSymmetric(gram);
  double best = 0.0;
  for (int j = 0; j < actions.size(); ++j) {
    const Vector a = actions.action(j);
    if (span.OrthogonalResidual(a) > kOutOfSpanTol * std::max(1.0, a.norm())) {
      throw Error(ErrorCode::kOutOfSpan,
                  "action " + std::to_string(j) + " is outside the gram span");
    }
    best = std::max(best, span.InverseSqrtCoords(a).squaredNorm());
  }
  return best;
}

std::string ToString(ClientModel model) {
  return model == ClientModel::kM1 ? "M1" : "M2";
}

ClientModel ParseClientModel(const std::string& text) {
  if (text == "M1" || text == "m1") return ClientModel::kM1;
  if (text == "M2" || text == "m2") return ClientModel::kM2;
  throw Error(ErrorCode::kInvalidArgument, "unknown client model '" + text + "'");
}

Coreset BuildCoreset(const Design& design, std::int64_t budget,
                     ClientModel model, double nu) {
  if (budget < 1) {
    throw Error(ErrorCode::kInvalidArgument, "coreset budget must be positive");
  }
  if (model == ClientModel::kM2 && !(nu > 0.0 && nu < 1.0)) {
    throw Error(ErrorCode::kInvalidNu,
                "M2 truncation nu must lie in (0, 1), got " + std::to_string(nu));
  }
  Coreset out;
  out.model = model;
  out.nu = model == ClientModel::kM2 ? nu : 0.0;
  out.budget = budget;
  const double m = static_cast<double>(budget);
  for (std::size_t a = 0; a < design.weights.size(); ++a) {
    const double pi = design.weights[a];
    if (pi <= 0.0) continue;
    const double share = model == ClientModel::kM1 ? pi : std::max(pi, nu);
    const auto count = static_cast<std::int64_t>(std::ceil(m * share));
    out.entries.push_back({static_cast<int>(a), count});
    out.total += count;
  }
  return out;
}

}  // namespace rpbandit
