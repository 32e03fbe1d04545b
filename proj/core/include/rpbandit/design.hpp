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

#ifndef RPBANDIT_DESIGN_HPP_
#define RPBANDIT_DESIGN_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rpbandit/linalg.hpp"

namespace rpbandit {

// Finite action set in R^d. Every action has Euclidean norm at most one.
class ActionSet {
 public:
  // A single zero action in R^1.
  ActionSet() : ActionSet(Matrix::Zero(1, 1)) {}
  // `actions` holds one action per column.
  explicit ActionSet(Matrix actions);
  static ActionSet FromRows(const std::vector<std::vector<double>>& rows);

  int dim() const { return static_cast<int>(actions_.rows()); }
  int size() const { return static_cast<int>(actions_.cols()); }
  auto action(int index) const { return actions_.col(index); }
  const Matrix& matrix() const { return actions_; }

  // Actions at `indices`, in that order.
  ActionSet Subset(std::span<const int> indices) const;

  std::vector<std::vector<double>> ToRows() const;

 private:
  Matrix actions_;
};

inline constexpr double kActionNormSlack = 1e-9;

struct DesignOptions {
  double tol = 0.05;
  int max_iters = 10000;
  // Support must stay within support_constant * r * max(1, log log r).
  double support_constant = 4.0;
};

// Approximate G-optimal design. Weights are indexed like the ActionSet it
// was computed for.
struct Design {
  std::vector<double> weights;
  Matrix gram;
  double gvalue = 0.0;
  int effective_dim = 0;
  int iterations = 0;

  std::vector<int> Support() const;
  int SupportSize() const;
};

double SupportBound(int effective_dim, double support_constant);

// Frank-Wolfe with away steps on log det M(pi), restricted to the span of the
// actions. Throws Error(kFailsToConverge) if the final design violates
// gvalue <= 2 r or the support bound.
Design ComputeDesign(const ActionSet& actions, const DesignOptions& options = {});

// max_a ||a||^2_{M^+} over the set; throws kOutOfSpan if any action leaves
// the span of `gram`.
double MaxWeightedNormSq(const ActionSet& actions, const Matrix& gram);

// <a, M^+ a>, pseudoinverse taken on the numerical range of `gram`.
double WeightedNormSq(const Vector& a, const Matrix& gram);

inline constexpr double kOutOfSpanTol = 1e-8;

enum class ClientModel { kM1, kM2 };

std::string ToString(ClientModel model);
ClientModel ParseClientModel(const std::string& text);

struct CoresetEntry {
  int action = 0;
  std::int64_t count = 0;

  bool operator==(const CoresetEntry&) const = default;
};

struct Coreset {
  std::vector<CoresetEntry> entries;
  std::int64_t total = 0;
  ClientModel model = ClientModel::kM1;
  double nu = 0.0;
  std::int64_t budget = 0;
};

// M1: n_a = ceil(m pi(a)); M2: n_a = ceil(m max(pi(a), nu)), over supp(pi).
Coreset BuildCoreset(const Design& design, std::int64_t budget,
                     ClientModel model, double nu = 0.0);

}  // namespace rpbandit

#endif  // RPBANDIT_DESIGN_HPP_
