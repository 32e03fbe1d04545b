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

#ifndef RPBANDIT_HARNESS_HPP_
#define RPBANDIT_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rpbandit/env.hpp"
#include "rpbandit/policy.hpp"

namespace rpbandit {

inline constexpr int kConfigSchemaVersion = 1;

// The JSON schema every experiment config is validated against.
const std::string& ConfigSchemaJson();

enum class Variant { kRobust, kVanilla, kNonPrivate, kNonRobust };

std::string ToString(Variant variant);
Variant ParseVariant(const std::string& text);

struct ExperimentConfig {
  int version = kConfigSchemaVersion;
  BanditInstance instance;
  std::int64_t horizon = 0;
  std::optional<int> batches;  // default ceil(log T)
  ClientModel model = ClientModel::kM1;
  AdversaryConfig adversary;
  PrivacyParams privacy;
  ThresholdConfig thresholds;  // model/privacy fields are filled from above
  DesignOptions design;
  RobustOptions robust;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<Variant> baselines;
  std::vector<std::int64_t> checkpoints;

  Schedule MakeSchedule() const;
  // "robust" followed by the baselines, in config order.
  std::vector<Variant> Variants() const;
};

// Parses and validates; throws Error(kConfigInvalid) with a field path such
// as "adversary.alpha: must lie in [0, 1/4)".
ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path);
std::string ConfigToJson(const ExperimentConfig& config);
// The normalized config embedded in a run's manifest.json, re-validated.
ExperimentConfig ParseManifestConfig(const std::string& manifest_text);

// One (seed, variant) run. Deterministic in (config, seed, variant).
RegretTrace RunCell(const ExperimentConfig& config, Variant variant,
                    std::uint64_t seed);

struct CellResult {
  Variant variant = Variant::kRobust;
  std::uint64_t seed = 0;
  std::optional<RegretTrace> trace;
  std::string error;  // non-empty when the run failed
  bool optimal_survived = false;
};

struct SummaryRow {
  std::string variant;
  std::int64_t checkpoint = 0;
  int count = 0;
  double mean = 0.0;
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr = 0.0;
};

struct SweepResult {
  std::vector<CellResult> cells;
  std::vector<SummaryRow> aggregates;
  // Fraction of successful runs whose final active set holds the optimal arm,
  // per variant, in Variants() order.
  std::vector<std::pair<std::string, double>> survival_rate;
  double wall_clock_seconds = 0.0;
};

struct SweepOptions {
  std::filesystem::path out_dir;  // empty: keep everything in memory
  int workers = 1;
  bool resume = false;
};

// Runs every (seed, variant) cell. With an output directory, each finished
// cell is written to traces/{variant}_{seed}.json and recorded in
// manifest.json before aggregation; summary.csv and plotdata.csv follow.
SweepResult RunSweep(const ExperimentConfig& config, const SweepOptions& options = {});

// Empirical quantile with linear interpolation between order statistics.
double Quantile(std::vector<double> values, double q);

// Throws kCheckpointOutOfRange if a checkpoint exceeds a trace's length.
std::vector<SummaryRow> Summarize(const std::vector<CellResult>& cells,
                                  const std::vector<std::int64_t>& checkpoints);

std::string SummaryToCsv(const std::vector<SummaryRow>& rows);
std::string SummaryToText(const std::vector<SummaryRow>& rows);

// Long format: variant,seed,plays,cumulative_regret, one row per round.
std::string PlotDataCsv(const std::vector<CellResult>& cells);

// Reads every traces/*.json under `out_dir`, sorted by file name.
// Cells stored under out_dir/traces, in sweep order when a manifest exists.
std::vector<CellResult> LoadCells(const std::filesystem::path& out_dir);

std::string CellToJson(const CellResult& cell);
CellResult ParseCell(const std::string& json_text);

}  // namespace rpbandit

#endif  // RPBANDIT_HARNESS_HPP_
