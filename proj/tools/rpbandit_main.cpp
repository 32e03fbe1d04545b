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

// rpbandit: experiment runner for robust, locally private batched linear
// bandits.
//
//   rpbandit gen-instance --dim 5 --actions 50 --seed 7 --out inst.json
//   rpbandit run --config exp.json --out out/ --workers 4 --resume
//   rpbandit summarize --out out/
//   rpbandit plot-data --out out/

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rpbandit/design.hpp"
#include "rpbandit/env.hpp"
#include "rpbandit/errors.hpp"
#include "rpbandit/harness.hpp"
#include "rpbandit/serialize.hpp"

namespace {

using namespace rpbandit;

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(',') == std::string::npos) {
    const auto count = std::stoull(text);
    if (count == 0) throw Error(ErrorCode::kConfigInvalid, "--seeds: count must be >= 1");
    for (std::uint64_t s = 0; s < count; ++s) out.push_back(s);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoull(item));
  }
  return out;
}

std::vector<std::int64_t> ParseCheckpoints(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoll(item));
  }
  return out;
}

std::string EnvOr(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

ExperimentConfig ConfigFromManifest(const std::filesystem::path& out_dir) {
  return ParseManifestConfig(ReadFile(out_dir / "manifest.json"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust, locally private batched linear bandit simulator"};
  app.require_subcommand(1);

  // gen-instance
  auto* gen = app.add_subcommand("gen-instance", "Emit a random bandit instance as JSON");
  int dim = 5;
  int num_actions = 50;
  double theta_norm = 1.0;
  std::string noise = "gaussian";
  std::uint64_t seed = 0;
  std::string gen_out;
  gen->add_option("--dim", dim, "Ambient dimension d")->check(CLI::PositiveNumber);
  gen->add_option("--actions", num_actions, "Number of actions K")->check(CLI::PositiveNumber);
  gen->add_option("--theta-norm", theta_norm, "Norm of theta*")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--noise", noise, "gaussian | uniform | zero");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output file (default: stdout)");

  // design
  auto* design_cmd = app.add_subcommand("design", "Compute an approximate G-optimal design");
  std::string actions_path;
  double design_tol = 0.05;
  design_cmd->add_option("--actions", actions_path, "Action-set JSON file")->required();
  design_cmd->add_option("--tol", design_tol, "Relative optimality tolerance");

  // run
  auto* run = app.add_subcommand("run", "Run a seeded sweep");
  std::string config_path;
  std::string out_dir;
  std::string seeds_text;
  int workers = 0;
  bool resume = false;
  run->add_option("--config", config_path, "Experiment config JSON")->required();
  run->add_option("--out", out_dir, "Output directory (env RPBANDIT_OUT_DIR)");
  run->add_option("--seeds", seeds_text, "Seed count N or comma-separated list");
  run->add_option("--workers", workers, "Worker threads (env RPBANDIT_WORKERS)");
  run->add_flag("--resume", resume, "Skip cells whose trace already exists");

  // summarize
  auto* summarize = app.add_subcommand("summarize", "Aggregate stored traces");
  std::string summary_dir;
  std::string checkpoints_text;
  summarize->add_option("--out", summary_dir, "Output directory of a run");
  summarize->add_option("--checkpoints", checkpoints_text, "Comma-separated play counts");

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "Write long-format plotting CSV");
  std::string plot_dir;
  plot->add_option("--out", plot_dir, "Output directory of a run");

  auto* schema = app.add_subcommand("schema", "Print the experiment-config JSON schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const BanditInstance inst =
          RandomInstance(dim, num_actions, theta_norm, ParseNoiseKind(noise), seed);
      const std::string text = InstanceToJson(inst);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        WriteFileAtomic(gen_out, text);
      }
      return 0;
    }
    if (design_cmd->parsed()) {
      DesignOptions opts;
      opts.tol = design_tol;
      std::cout << DesignToJson(ComputeDesign(LoadActionSet(actions_path), opts));
      return 0;
    }
    if (schema->parsed()) {
      std::cout << ConfigSchemaJson();
      return 0;
    }
    if (run->parsed()) {
      ExperimentConfig config = LoadConfig(config_path);
      if (!seeds_text.empty()) config.seeds = ParseSeeds(seeds_text);
      SweepOptions opts;
      opts.out_dir = out_dir.empty() ? EnvOr("RPBANDIT_OUT_DIR", "out") : out_dir;
      opts.workers = workers > 0 ? workers : std::stoi(EnvOr("RPBANDIT_WORKERS", "1"));
      opts.resume = resume;
      const SweepResult result = RunSweep(config, opts);
      int failures = 0;
      for (const CellResult& c : result.cells) {
        if (!c.error.empty()) {
          ++failures;
          std::cerr << "cell " << ToString(c.variant) << "_" << c.seed
                    << " failed: " << c.error << "\n";
        }
      }
      std::cout << SummaryToText(result.aggregates);
      for (const auto& [variant, rate] : result.survival_rate) {
        std::cout << "optimal-arm survival " << variant << ": " << rate << "\n";
      }
      std::cout << "wrote " << result.cells.size() << " traces to " << opts.out_dir.string()
                << " in " << result.wall_clock_seconds << " s\n";
      return failures == 0 ? 0 : 3;
    }
    if (summarize->parsed()) {
      const std::filesystem::path dir =
          summary_dir.empty() ? EnvOr("RPBANDIT_OUT_DIR", "out") : summary_dir;
      std::vector<std::int64_t> checkpoints = ParseCheckpoints(checkpoints_text);
      if (checkpoints.empty()) checkpoints = ConfigFromManifest(dir).checkpoints;
      const auto rows = Summarize(LoadCells(dir), checkpoints);
      WriteFileAtomic(dir / "summary.csv", SummaryToCsv(rows));
      std::cout << SummaryToText(rows);
      return 0;
    }
    if (plot->parsed()) {
      const std::filesystem::path dir =
          plot_dir.empty() ? EnvOr("RPBANDIT_OUT_DIR", "out") : plot_dir;
      WriteFileAtomic(dir / "plotdata.csv", PlotDataCsv(LoadCells(dir)));
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
