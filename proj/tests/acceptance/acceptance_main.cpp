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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//
//   acceptance [--scratch DIR] [--only N]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rpbandit/design.hpp"
#include "rpbandit/env.hpp"
#include "rpbandit/harness.hpp"
#include "rpbandit/policy.hpp"
#include "rpbandit/privacy.hpp"
#include "rpbandit/robust.hpp"
#include "rpbandit/serialize.hpp"

namespace {

using namespace rpbandit;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double Median(std::vector<double> v) { return Quantile(std::move(v), 0.5); }

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// G-optimal coreset plays for one batch of about n plays.
struct Plays {
  std::vector<Vector> actions;
  std::vector<double> rewards;
  ActionSet query;
};

Plays CollectPlays(const BanditInstance& inst, std::int64_t n, const AdversaryConfig& adv,
                   std::uint64_t seed) {
  const Design design = ComputeDesign(inst.actions);
  const Coreset coreset = BuildCoreset(design, n, ClientModel::kM1);
  const auto obs = ObserveBatchM1(inst, coreset, adv, PrivacyParams{}, Stream(seed));
  Plays p{{}, {}, inst.actions};
  for (const Observation& o : obs) {
    p.actions.emplace_back(inst.actions.action(o.action_index));
    p.rewards.push_back(o.reported_reward);
  }
  return p;
}

// 1. Design certificate.
Outcome DesignCertificate() {
  const auto start = Clock::now();
  Stream rng(MixSeed(1, {TagHash("design")}));
  std::normal_distribution<double> normal;
  int violations = 0;
  double worst_ratio = 0.0;
  int worst_support = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 9);
    const int k = d + static_cast<int>(rng() % static_cast<std::uint64_t>(200 - d + 1));
    Matrix cols(d, k);
    for (int j = 0; j < k; ++j) {
      Vector v(d);
      for (int i = 0; i < d; ++i) v(i) = normal(rng);
      cols.col(j) = v / v.norm() * (0.25 + 0.75 * rng.NextOpenUnit());
    }
    const Design design = ComputeDesign(ActionSet(cols));
    const double support_cap = 4.0 * d * std::max(1.0, std::log(std::log(double(d))));
    const bool ok = design.gvalue <= 2.0 * design.effective_dim &&
                    design.SupportSize() <= support_cap;
    violations += ok ? 0 : 1;
    worst_ratio = std::max(worst_ratio, design.gvalue / design.effective_dim);
    worst_support = std::max(worst_support, design.SupportSize());
  }
  const double secs = Seconds(start);
  return {violations == 0 && secs < 60.0,
          Fmt("50 sets, violations=%d, max gvalue/r=%.4f, max support=%d, %.2fs", violations,
              worst_ratio, worst_support, secs)};
}

// 2. Filter / oracle equivalence on clean data.
Outcome FilterOracleEquivalence() {
  int failures = 0;
  double worst = 0.0;
  int mean_mismatch = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(trial % 7);
    const int k = d + static_cast<int>(trial % 23);
    const BanditInstance inst = RandomInstance(d, k, 1.0, NoiseKind::kGaussian, 7000 + trial);
    const std::int64_t n = 20 + static_cast<std::int64_t>((trial * 37) % 460);
    const Plays p = CollectPlays(inst, n, AdversaryConfig{}, trial);
    Stream rng(trial);
    const RobustEstimate est = RobustLeastSquares(p.query, p.actions, p.rewards, rng);
    const Vector vanilla = VanillaLeastSquares(p.query, p.actions, p.rewards);
    const Vector diff = est.theta - vanilla;
    const double mnorm = std::sqrt(std::max(0.0, diff.dot(est.gram * diff)));
    worst = std::max(worst, mnorm);
    if (est.diagnostics.removed_count != 0 || mnorm > 1e-8) ++failures;

    // The filter itself, on the transformed points: no removal, exact mean.
    const SpanDecomposition span = DecomposeSymmetric(est.gram);
    Matrix pts(span.rank(), static_cast<Eigen::Index>(p.actions.size()));
    for (std::size_t i = 0; i < p.actions.size(); ++i) {
      pts.col(static_cast<Eigen::Index>(i)) = span.InverseSqrtCoords(p.actions[i]) * p.rewards[i];
    }
    Stream frng(trial);
    const FilterResult fr = SpectralFilter(pts, est.lambda_used, frng);
    const Vector mean = pts.rowwise().mean();
    if (fr.diagnostics.removed_count != 0 || fr.mean != mean) ++mean_mismatch;
  }
  return {failures == 0 && mean_mismatch == 0,
          Fmt("100 instances, max M_n-norm gap=%.3g, regression mismatches=%d, "
              "filter mean mismatches=%d",
              worst, failures, mean_mismatch)};
}

// 3. Robust estimation under contamination.
Outcome RobustEstimation() {
  std::vector<double> robust_err;
  std::vector<double> vanilla_err;
  std::vector<double> removed;
  const BanditInstance inst = RandomInstance(5, 50, 1.0, NoiseKind::kGaussian, 303);
  AdversaryConfig adv;
  adv.alpha = 0.10;
  adv.strategy = Strategy::kLargePositive;
  adv.magnitude = 50.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Plays p = CollectPlays(inst, 2000, adv, 9000 + seed);
    Stream rng(seed);
    const RobustEstimate est = RobustLeastSquares(p.query, p.actions, p.rewards, rng);
    robust_err.push_back((est.theta - inst.theta_star).norm());
    removed.push_back(est.diagnostics.removed_count);
    vanilla_err.push_back(
        (VanillaLeastSquares(p.query, p.actions, p.rewards) - inst.theta_star).norm());
  }
  const double rm = Median(robust_err);
  const double vm = Median(vanilla_err);
  return {rm <= 0.5 && vm >= 2.0,
          Fmt("median error robust=%.3f (need <= 0.5), vanilla=%.3f (need >= 2.0), "
              "median removed=%.0f",
              rm, vm, Median(removed))};
}

ExperimentConfig SweepConfig(std::int64_t horizon, int seeds, const std::string& adversary,
                             const std::string& extra = "") {
  const std::string text = R"({"version": 1,
      "instance": {"random": {"dim": 5, "actions": 50, "seed": 2026}},
      "horizon": )" + std::to_string(horizon) +
                           R"(, "master_seed": 424242, "seeds": )" + std::to_string(seeds) +
                           R"(, "adversary": )" + adversary + extra + "}";
  return ParseConfig(text);
}

double MeanFinalRegret(const SweepResult& r, Variant v) {
  std::vector<double> finals;
  for (const CellResult& c : r.cells) {
    if (c.variant == v && c.trace) finals.push_back(c.trace->cumulative_regret);
  }
  return finals.empty() ? NAN : Mean(finals);
}

int FailedCells(const SweepResult& r) {
  int n = 0;
  for (const CellResult& c : r.cells) n += c.error.empty() ? 0 : 1;
  return n;
}

// 4. Sublinear regret trend.
Outcome SublinearRegret() {
  const auto start = Clock::now();
  const std::string clean = R"({"alpha": 0})";
  const SweepResult small = RunSweep(SweepConfig(20000, 20, clean));
  const SweepResult large = RunSweep(SweepConfig(80000, 20, clean));
  const double r1 = MeanFinalRegret(small, Variant::kRobust);
  const double r2 = MeanFinalRegret(large, Variant::kRobust);
  const double secs = Seconds(start);
  const int failed = FailedCells(small) + FailedCells(large);
  return {failed == 0 && r2 / r1 <= 2.6 && secs < 300.0,
          Fmt("R(2e4)=%.1f, R(8e4)=%.1f, ratio=%.3f (need <= 2.6), failed cells=%d, %.1fs", r1,
              r2, r2 / r1, failed, secs)};
}

// 5. Robustness benefit.
Outcome RobustnessBenefit(const fs::path& scratch) {
  const ExperimentConfig cfg = SweepConfig(
      40000, 20, R"({"alpha": 0.1, "strategy": "anti-optimal", "magnitude": 10})",
      R"(, "baselines": ["vanilla"])");
  const SweepResult r = RunSweep(cfg, {scratch / "c5", 1, false});
  const double robust = MeanFinalRegret(r, Variant::kRobust);
  const double vanilla = MeanFinalRegret(r, Variant::kVanilla);
  int filter_failures = 0;
  for (const CellResult& c : r.cells) {
    if (!c.trace) continue;
    for (const RoundRecord& rec : c.trace->rounds) filter_failures += rec.filter_failed ? 1 : 0;
  }
  return {FailedCells(r) == 0 && robust <= 0.5 * vanilla,
          Fmt("mean regret robust=%.1f, vanilla=%.1f, ratio=%.3f (need <= 0.5), "
              "filter fallbacks=%d",
              robust, vanilla, robust / vanilla, filter_failures)};
}

// 6. Optimal-arm survival plus the per-round conditional facts.
Outcome OptimalArmSurvival() {
  int eliminated = 0;
  int checked_rounds = 0;
  int fact_violations = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const BanditInstance inst = RandomInstance(5, 50, 1.0, NoiseKind::kGaussian, 600 + seed);
    Environment env(inst, AdversaryConfig{}, PrivacyParams{}, ClientModel::kM1,
                    Stream(MixSeed(seed, {TagHash("env")})));
    PolicyOptions opts;
    opts.thresholds.delta = 0.05;
    const Schedule schedule = Schedule::Make(20000, Schedule::DefaultBatches(20000));
    const RegretTrace t =
        RunElimination(env, schedule, opts, Stream(MixSeed(seed, {TagHash("learner")})));
    const int best = inst.OptimalAction();
    const auto& fin = t.rounds.back().active_after;
    if (std::find(fin.begin(), fin.end(), best) == fin.end()) ++eliminated;

    for (const RoundRecord& rec : t.rounds) {
      if (!rec.exploration) continue;
      double err = 0.0;
      for (int a : rec.active_before) {
        err = std::max(err, std::abs(inst.actions.action(a).dot(rec.estimate - inst.theta_star)));
      }
      const bool has_best = std::find(rec.active_before.begin(), rec.active_before.end(),
                                      best) != rec.active_before.end();
      if (err > rec.gamma || !has_best) continue;
      ++checked_rounds;
      if (std::find(rec.active_after.begin(), rec.active_after.end(), best) ==
          rec.active_after.end()) {
        ++fact_violations;
      }
      for (int a : rec.active_after) {
        if (InstantaneousRegret(inst, a) > 4.0 * rec.gamma) ++fact_violations;
      }
    }
  }
  return {eliminated <= 10 && fact_violations == 0 && checked_rounds > 0,
          Fmt("optimal arm eliminated in %d/100 runs (need <= 10), conditional rounds "
              "checked=%d, violations=%d",
              eliminated, checked_rounds, fact_violations)};
}

// 7. Privacy mechanism distribution.
Outcome PrivacyDistribution() {
  constexpr int kN = 100000;
  const double crit = testing::KsCritical01(kN);
  auto ks = [&](double eps, std::int64_t n_a, bool m2, std::uint64_t seed, double* iqr) {
    PrivacyParams p;
    p.enabled = true;
    p.epsilon = eps;
    Stream rng(seed);
    std::vector<double> xs(kN);
    for (double& x : xs) x = m2 ? PrivatizeM2(0.0, n_a, p, rng) : PrivatizeM1(0.0, p, rng);
    const double scale = m2 ? 2.0 / (static_cast<double>(n_a) * eps) : 2.0 / eps;
    if (iqr != nullptr) {
      *iqr = testing::SampleQuantile(xs, 0.75) - testing::SampleQuantile(xs, 0.25);
    }
    return testing::KsOneSample(xs, [scale](double x) { return LaplaceCdf(x, scale); });
  };
  double iqr1 = 0.0;
  double iqr2 = 0.0;
  const double d_m1 = ks(1.0, 1, false, 71, &iqr1);
  const double d_m1b = ks(2.0, 1, false, 72, &iqr2);
  const double d_m2 = ks(1.0, 50, true, 73, nullptr);
  const double ratio = iqr1 / iqr2;
  const bool ok = d_m1 < crit && d_m1b < crit && d_m2 < crit && std::abs(ratio - 2.0) <= 0.2;
  return {ok, Fmt("KS D: M1=%.5f, M1(eps=2)=%.5f, M2(n_a=50)=%.5f (critical %.5f), "
                  "IQR ratio=%.4f (need 2 +/- 10%%)",
                  d_m1, d_m1b, d_m2, crit, ratio)};
}

// 8. M2 batch accounting across a sweep.
Outcome M2BatchAccounting(const fs::path& scratch, SweepResult* keep) {
  const ExperimentConfig cfg = SweepConfig(
      60000, 8, R"({"alpha": 0.05, "strategy": "sign-flip", "magnitude": 3})",
      R"(, "model": "M2", "privacy": {"epsilon": 1, "enabled": true},
         "thresholds": {"nu": 0.01}, "baselines": ["vanilla", "non-private", "non-robust"])");
  *keep = RunSweep(cfg, {scratch / "c8a", 1, false});
  int rounds = 0;
  int violations = 0;
  for (const CellResult& c : keep->cells) {
    if (!c.trace) continue;
    for (const RoundRecord& r : c.trace->rounds) {
      if (!r.exploration) continue;
      ++rounds;
      // sum n_a <= k + m (1 + k nu), nu = 1/100, in integers.
      const std::int64_t k = r.support_size;
      if (100 * r.batch_size > 100 * k + 100 * r.budget + r.budget * k) ++violations;
    }
  }
  return {FailedCells(*keep) == 0 && violations == 0 && rounds > 0,
          Fmt("%d M2 rounds over %zu cells, violations=%d, failed cells=%d", rounds,
              keep->cells.size(), violations, FailedCells(*keep))};
}

// 9. Corruption-mask concentration.
Outcome MaskConcentration() {
  const BanditInstance inst = RandomInstance(2, 2, 1.0, NoiseKind::kGaussian, 9);
  AdversaryConfig adv;
  adv.alpha = 0.1;
  adv.strategy = Strategy::kConstant;
  adv.magnitude = 1.0;
  Coreset c;
  c.entries = {{0, 10000}};
  c.total = 10000;
  c.budget = 10000;
  const double n = 10000.0;
  const double band = 3.0 * std::sqrt(0.1 * std::log(1.0 / 0.01) / n);
  int exceed = 0;
  double worst = 0.0;
  for (std::uint64_t draw = 0; draw < 1000; ++draw) {
    const auto obs = ObserveBatchM1(inst, c, adv, PrivacyParams{},
                                    Stream(MixSeed(draw, {TagHash("mask")})));
    int good = 0;
    for (const Observation& o : obs) good += o.corrupted ? 0 : 1;
    const double dev = std::abs(good / n - 0.9);
    worst = std::max(worst, dev);
    exceed += dev > band ? 1 : 0;
  }
  return {exceed < 20, Fmt("exceedances=%d/1000 (need < 20), band=%.5f, max deviation=%.5f",
                           exceed, band, worst)};
}

std::vector<fs::path> TraceFiles(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir / "traces")) out.push_back(e.path().filename());
  std::sort(out.begin(), out.end());
  return out;
}

// 10. Reproducibility.
Outcome Reproducibility(const fs::path& scratch, const SweepResult& first) {
  const ExperimentConfig cfg = SweepConfig(
      60000, 8, R"({"alpha": 0.05, "strategy": "sign-flip", "magnitude": 3})",
      R"(, "model": "M2", "privacy": {"epsilon": 1, "enabled": true},
         "thresholds": {"nu": 0.01}, "baselines": ["vanilla", "non-private", "non-robust"])");
  RunSweep(cfg, {scratch / "c8b", 3, false});
  const auto a = TraceFiles(scratch / "c8a");
  const auto b = TraceFiles(scratch / "c8b");
  int differing = a == b ? 0 : 1;
  for (const fs::path& f : a) {
    if (!fs::exists(scratch / "c8b" / "traces" / f)) continue;
    if (ReadFile(scratch / "c8a" / "traces" / f) != ReadFile(scratch / "c8b" / "traces" / f)) {
      ++differing;
    }
  }
  for (const char* f : {"summary.csv", "plotdata.csv", "manifest.json"}) {
    if (ReadFile(scratch / "c8a" / f) != ReadFile(scratch / "c8b" / f)) ++differing;
  }
  // A second in-process run of a criterion-5 cell matches its stored trace.
  const ExperimentConfig c5 = SweepConfig(
      40000, 20, R"({"alpha": 0.1, "strategy": "anti-optimal", "magnitude": 10})",
      R"(, "baselines": ["vanilla"])");
  for (const char* stem : {"robust_3", "vanilla_17"}) {
    const fs::path stored = scratch / "c5" / "traces" / (std::string(stem) + ".json");
    if (!fs::exists(stored)) {
      ++differing;
      continue;
    }
    const CellResult cell = ParseCell(ReadFile(stored));
    const RegretTrace again = RunCell(c5, cell.variant, cell.seed);
    if (!cell.trace || TraceToJson(again) != TraceToJson(*cell.trace)) ++differing;
  }
  return {differing == 0 && !first.cells.empty(),
          Fmt("%zu trace files compared across worker counts (1 vs 3), differing=%d", a.size() * 2,
              differing)};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path scratch = fs::temp_directory_path() / "rpbandit_acceptance";
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--scratch") == 0 && i + 1 < argc) {
      scratch = argv[++i];
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--scratch DIR] [--only N]\n");
      return 2;
    }
  }
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  SweepResult m2_sweep;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"design certificate", DesignCertificate},
      {"filter/oracle equivalence", FilterOracleEquivalence},
      {"robust estimation under contamination", RobustEstimation},
      {"sublinear regret trend", SublinearRegret},
      {"robustness benefit", [&] { return RobustnessBenefit(scratch); }},
      {"optimal-arm survival", OptimalArmSurvival},
      {"privacy mechanism distribution", PrivacyDistribution},
      {"M2 batch accounting", [&] { return M2BatchAccounting(scratch, &m2_sweep); }},
      {"corruption-mask concentration", MaskConcentration},
      {"reproducibility", [&] { return Reproducibility(scratch, m2_sweep); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (only != 0 && id != only) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    failed += out.pass ? 0 : 1;
    std::printf("%s criterion %d (%s): %s\n", out.pass ? "PASS" : "FAIL", id,
                criteria[i].first, out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
