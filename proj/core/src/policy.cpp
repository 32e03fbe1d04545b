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

#include "rpbandit/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rpbandit/errors.hpp"

namespace rpbandit {

Schedule Schedule::Make(std::int64_t horizon, int num_batches) {
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon T must be >= 1");
  if (num_batches < 2) {
    throw Error(ErrorCode::kInvalidArgument, "number of batches B must be >= 2");
  }
  Schedule s;
  s.horizon = horizon;
  s.num_batches = num_batches;
  s.q = std::pow(static_cast<double>(horizon), 1.0 / num_batches);
  for (int i = 1; i < num_batches; ++i) {
    s.round_budgets.push_back(static_cast<std::int64_t>(std::ceil(s.QPow(i))));
  }
  return s;
}

int Schedule::DefaultBatches(std::int64_t horizon) {
  const double b = std::ceil(std::log(static_cast<double>(std::max<std::int64_t>(horizon, 1))));
  return std::max(2, static_cast<int>(b));
}

double Schedule::QPow(int i) const {
  // q^i = T^{i/B}, computed directly so that q^B == T exactly.
  return std::pow(static_cast<double>(horizon),
                  static_cast<double>(i) / static_cast<double>(num_batches));
}

void ThresholdConfig::Validate() const {
  if (!(c_gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "c_gamma must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
  }
  if (!(alpha >= 0.0 && alpha < 0.25)) {
    throw Error(ErrorCode::kInvalidArgument, "learner alpha must lie in [0, 1/4)");
  }
  if (model == ClientModel::kM2 && !(nu > 0.0 && nu < 1.0)) {
    throw Error(ErrorCode::kInvalidNu, "M2 truncation nu must lie in (0, 1)");
  }
  if (private_reports && !(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
}

double ThresholdM1(int round, const Schedule& schedule,
                   const ThresholdConfig& cfg, int dim) {
  if (round < 1) throw Error(ErrorCode::kInvalidArgument, "round index must be >= 1");
  const double d = dim;
  const double qi = schedule.QPow(cfg.indexing == ThresholdIndexing::kAlgorithm
                                      ? round
                                      : round - 1);
  const double log_q = std::log(qi / cfg.delta);
  const double log_inv = std::log(1.0 / cfg.delta);
  const double inv_eps = cfg.private_reports ? 1.0 / cfg.epsilon : 0.0;
  const double a = cfg.alpha;

  const double corruption = std::sqrt(d) * (std::sqrt(log_q) + log_q * inv_eps) *
                            (std::sqrt(a) + a * std::sqrt(d));
  const double sampling =
      std::sqrt(d * log_inv / qi) * (1.0 + std::sqrt(log_inv) * inv_eps);
  return cfg.c_gamma * (corruption + a + sampling);
}

double ThresholdM2(int round, const Schedule& schedule,
                   const ThresholdConfig& cfg, int dim, int k) {
  if (round < 1 || round > static_cast<int>(schedule.round_budgets.size())) {
    throw Error(ErrorCode::kInvalidArgument, "round index out of schedule range");
  }
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "support size k must be >= 1");
  if (!(cfg.nu > 0.0)) throw Error(ErrorCode::kInvalidNu, "nu must be positive");
  const double d = dim;
  const double num = cfg.nu * static_cast<double>(schedule.round_budgets[round - 1]);
  const double log_inv = std::log(1.0 / cfg.delta);
  const double log_k = std::log(static_cast<double>(k) / cfg.delta);
  const double inv_eps = cfg.private_reports ? 1.0 / cfg.epsilon : 0.0;
  const double a = cfg.alpha;

  const double sampling =
      std::sqrt(d * log_inv / num) * (1.0 + std::sqrt(log_inv / num) * inv_eps);
  const double corruption =
      2.0 * d * (1.0 + std::sqrt(log_k / num) + log_k / num * inv_eps) *
      (std::sqrt(static_cast<double>(k) * a) + std::sqrt(a * log_inv));
  return cfg.c_gamma * (sampling + corruption + a);
}

std::vector<int> EliminationSurvivors(const ActionSet& actions,
                                      const std::vector<int>& active,
                                      const Vector& theta, double gamma) {
  std::vector<double> scores;
  scores.reserve(active.size());
  double best = -std::numeric_limits<double>::infinity();
  for (int a : active) {
    scores.push_back(actions.action(a).dot(theta));
    best = std::max(best, scores.back());
  }
  std::vector<int> keep;
  for (std::size_t j = 0; j < active.size(); ++j) {
    if (scores[j] >= best - 2.0 * gamma) keep.push_back(active[j]);
  }
  return keep;
}

std::vector<double> RegretTrace::PerPlayRegret() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(total_plays));
  for (const PlaySegment& s : plays) out.insert(out.end(), s.count, s.regret);
  return out;
}

double RegretTrace::CumulativeAt(std::int64_t count) const {
  if (count < 0 || count > total_plays) {
    throw Error(ErrorCode::kCheckpointOutOfRange,
                "checkpoint " + std::to_string(count) + " outside [0, " +
                    std::to_string(total_plays) + "]");
  }
  double sum = 0.0;
  std::int64_t seen = 0;
  for (const PlaySegment& s : plays) {
    if (seen >= count) break;
    const std::int64_t take = std::min(s.count, count - seen);
    sum += static_cast<double>(take) * s.regret;
    seen += take;
  }
  return sum;
}

namespace {

int BestActive(const ActionSet& actions, const std::vector<int>& active,
               const Vector& theta) {
  int best = active.front();
  double best_score = actions.action(best).dot(theta);
  for (int a : active) {
    const double s = actions.action(a).dot(theta);
    if (s > best_score || (s == best_score && a < best)) {
      best = a;
      best_score = s;
    }
  }
  return best;
}

// The learner proper. Sees only the channel.
std::vector<RoundRecord> RunLearner(LearnerChannel& channel, const Schedule& schedule,
                                    const PolicyOptions& options, Stream rng) {
  const ActionSet& actions = channel.actions();
  const ThresholdConfig& cfg = options.thresholds;
  cfg.Validate();
  if (cfg.model != channel.model()) {
    throw Error(ErrorCode::kInvalidArgument,
                "policy configured for " + ToString(cfg.model) +
                    " but environment uses " + ToString(channel.model()));
  }

  std::vector<int> active(static_cast<std::size_t>(actions.size()));
  for (int a = 0; a < actions.size(); ++a) active[a] = a;

  std::vector<RoundRecord> rounds;
  std::int64_t used = 0;
  Vector last_estimate;

  for (int i = 1; i < schedule.num_batches; ++i) {
    if (active.size() == 1) break;
    RoundRecord rec;
    rec.round = i;
    rec.active_before = active;
    rec.budget = schedule.round_budgets[i - 1];

    const ActionSet sub = actions.Subset(active);
    const Design design = ComputeDesign(sub, options.design);
    Coreset coreset = BuildCoreset(design, rec.budget, cfg.model, cfg.nu);
    if (used + coreset.total > schedule.horizon) break;
    for (CoresetEntry& e : coreset.entries) e.action = active[e.action];
    rec.support_size = static_cast<int>(coreset.entries.size());
    rec.batch_size = coreset.total;

    const std::vector<Report> reports = channel.PlayBatch(coreset, i);
    used += coreset.total;
    rec.reports = static_cast<int>(reports.size());

    std::vector<Vector> xs;
    std::vector<double> ys;
    xs.reserve(reports.size());
    ys.reserve(reports.size());
    for (const Report& r : reports) {
      xs.emplace_back(actions.action(r.action_index));
      ys.push_back(r.reward);
    }

    if (options.estimator == Estimator::kRobust) {
      Stream filter_rng = rng.Derive({static_cast<std::uint64_t>(i)});
      try {
        RobustEstimate est = RobustLeastSquares(sub, xs, ys, filter_rng, options.robust);
        rec.estimate = std::move(est.theta);
        rec.filter = std::move(est.diagnostics);
        rec.lambda = est.lambda_used;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTooManyRemoved) throw;
        rec.filter_failed = true;
        rec.filter_error = e.what();
        rec.estimate = VanillaLeastSquares(sub, xs, ys);
      }
    } else {
      rec.estimate = VanillaLeastSquares(sub, xs, ys);
    }

    rec.gamma = cfg.model == ClientModel::kM1
                    ? ThresholdM1(i, schedule, cfg, actions.dim())
                    : ThresholdM2(i, schedule, cfg, actions.dim(), rec.support_size);
    rec.active_after = EliminationSurvivors(actions, active, rec.estimate, rec.gamma);
    rec.cumulative_plays = used;
    active = rec.active_after;
    last_estimate = rec.estimate;
    rounds.push_back(std::move(rec));
  }

  RoundRecord final_round;
  final_round.round = schedule.num_batches;
  final_round.exploration = false;
  final_round.active_before = active;
  final_round.active_after = active;
  final_round.committed_action =
      last_estimate.size() > 0 ? BestActive(actions, active, last_estimate) : active.front();
  final_round.batch_size = schedule.horizon - used;
  final_round.budget = final_round.batch_size;
  channel.Commit(final_round.committed_action, final_round.batch_size);
  used += final_round.batch_size;
  final_round.cumulative_plays = used;
  rounds.push_back(std::move(final_round));
  return rounds;
}

}  // namespace

RegretTrace RunElimination(Environment& env, const Schedule& schedule,
                           const PolicyOptions& options, Stream rng) {
  RegretTrace trace;
  trace.rounds = RunLearner(env.learner(), schedule, options, rng);

  for (const CoresetEntry& e : env.play_log()) {
    const double regret = InstantaneousRegret(env.instance(), e.action);
    if (!trace.plays.empty() && trace.plays.back().action == e.action &&
        trace.plays.back().regret == regret) {
      trace.plays.back().count += e.count;
    } else {
      trace.plays.push_back({e.action, e.count, regret});
    }
    trace.total_plays += e.count;
  }
  trace.cumulative_regret = trace.CumulativeAt(trace.total_plays);
  for (RoundRecord& r : trace.rounds) {
    r.cumulative_regret = trace.CumulativeAt(r.cumulative_plays);
  }
  return trace;
}

RegretTrace RunVanillaElimination(Environment& env, const Schedule& schedule,
                                  PolicyOptions options, Stream rng) {
  options.estimator = Estimator::kVanilla;
  options.thresholds.alpha = 0.0;
  return RunElimination(env, schedule, options, rng);
}

}  // namespace rpbandit
