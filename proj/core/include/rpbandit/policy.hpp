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

#ifndef RPBANDIT_POLICY_HPP_
#define RPBANDIT_POLICY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rpbandit/design.hpp"
#include "rpbandit/env.hpp"
#include "rpbandit/robust.hpp"

namespace rpbandit {

// Geometric batch schedule: q = T^{1/B}, m_i = ceil(q^i) for the B - 1
// exploration rounds; the final round takes whatever budget is left.
struct Schedule {
  std::int64_t horizon = 0;  // T
  int num_batches = 0;       // B
  double q = 1.0;
  std::vector<std::int64_t> round_budgets;  // m_1 .. m_{B-1}

  static Schedule Make(std::int64_t horizon, int num_batches);
  // B = ceil(log T), at least 2.
  static int DefaultBatches(std::int64_t horizon);
  double QPow(int i) const;
};

// Which power of q the M1 threshold uses in round i.
enum class ThresholdIndexing {
  kAlgorithm,  // q^i, as listed in the algorithm
  kProof,      // q^{i-1}, as indexed in the regret proof
};

struct ThresholdConfig {
  double c_gamma = 1.0;
  double delta = 0.05;
  double alpha = 0.0;  // corruption rate assumed by the learner
  double nu = 0.01;    // M2 truncation
  ClientModel model = ClientModel::kM1;
  ThresholdIndexing indexing = ThresholdIndexing::kAlgorithm;
  // Learner's view of the privacy level; epsilon terms vanish when disabled.
  bool private_reports = false;
  double epsilon = 1.0;

  void Validate() const;
};

double ThresholdM1(int round, const Schedule& schedule,
                   const ThresholdConfig& cfg, int dim);

// `k` is the support size of the round's design.
double ThresholdM2(int round, const Schedule& schedule,
                   const ThresholdConfig& cfg, int dim, int k);

enum class Estimator { kRobust, kVanilla };

struct PolicyOptions {
  ThresholdConfig thresholds;
  DesignOptions design;
  RobustOptions robust;
  Estimator estimator = Estimator::kRobust;
};

struct RoundRecord {
  int round = 0;
  std::vector<int> active_before;
  std::vector<int> active_after;
  double gamma = 0.0;
  Vector estimate;
  std::int64_t budget = 0;      // m_i
  std::int64_t batch_size = 0;  // plays in the round
  int support_size = 0;         // k
  int reports = 0;              // learner-visible responses
  bool exploration = true;      // false for the final committed round
  int committed_action = -1;    // set on the final round
  FilterDiagnostics filter;
  double lambda = 0.0;
  bool filter_failed = false;
  std::string filter_error;
  std::int64_t cumulative_plays = 0;
  double cumulative_regret = 0.0;
};

// One run-length segment of the play sequence.
struct PlaySegment {
  int action = 0;
  std::int64_t count = 0;
  double regret = 0.0;  // per play

  bool operator==(const PlaySegment&) const = default;
};

struct RegretTrace {
  std::vector<RoundRecord> rounds;
  std::vector<PlaySegment> plays;
  double cumulative_regret = 0.0;
  std::int64_t total_plays = 0;

  // Per-play regret, expanded.
  std::vector<double> PerPlayRegret() const;
  // Cumulative regret after the first `plays` plays.
  double CumulativeAt(std::int64_t plays) const;
};

// Batched robust arm elimination. The learner only sees env.learner(); the
// environment's oracle data is read afterwards to fill in regret.
RegretTrace RunElimination(Environment& env, const Schedule& schedule,
                           const PolicyOptions& options, Stream rng);

// Baseline: ordinary least squares and thresholds with alpha = 0.
RegretTrace RunVanillaElimination(Environment& env, const Schedule& schedule,
                                  PolicyOptions options, Stream rng);

// Surviving active indices for estimate `theta` and width `gamma`:
// keep a with <a, theta> >= max_a' <a', theta> - 2 gamma.
std::vector<int> EliminationSurvivors(const ActionSet& actions,
                                      const std::vector<int>& active,
                                      const Vector& theta, double gamma);

}  // namespace rpbandit

#endif  // RPBANDIT_POLICY_HPP_
