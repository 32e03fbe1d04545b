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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "json.hpp"
#include "rpbandit/serialize.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rpbandit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int Cli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " " + std::string(RPBANDIT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void WriteConfig(const fs::path& dir) {
  std::ofstream(dir / "exp.json") << R"({
    "version": 1,
    "instance": "inst.json",
    "horizon": 3000,
    "adversary": {"alpha": 0.05, "strategy": "large-positive", "magnitude": 10},
    "seeds": 2,
    "baselines": ["vanilla"]
  })";
}

TEST(Cli, GenInstanceThenRun) {
  const fs::path dir = TempDir("run");
  ASSERT_EQ(Cli("gen-instance --dim 3 --actions 8 --seed 4 --out " + (dir / "inst.json").string()),
            0);
  const json inst = json::parse(rpbandit::ReadFile(dir / "inst.json"));
  EXPECT_EQ(inst.at("theta_star").size(), 3u);
  EXPECT_EQ(inst.at("actions").at("actions").size(), 8u);
  WriteConfig(dir);

  const fs::path out = dir / "out";
  ASSERT_EQ(Cli("run --config " + (dir / "exp.json").string() + " --out " + out.string() +
                " --seeds 3,9 --workers 2"),
            0);
  for (const char* f : {"manifest.json", "summary.csv", "plotdata.csv",
                        "traces/robust_3.json", "traces/vanilla_9.json",
                        "traces/robust_9.csv"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const std::string plot = rpbandit::ReadFile(out / "plotdata.csv");
  EXPECT_EQ(plot.substr(0, plot.find('\n')), "variant,seed,plays,cumulative_regret");

  // summarize and plot-data rebuild the same files from the stored traces.
  const std::string summary = rpbandit::ReadFile(out / "summary.csv");
  fs::remove(out / "summary.csv");
  fs::remove(out / "plotdata.csv");
  ASSERT_EQ(Cli("summarize --out " + out.string()), 0);
  ASSERT_EQ(Cli("plot-data --out " + out.string()), 0);
  EXPECT_EQ(rpbandit::ReadFile(out / "summary.csv"), summary);
  EXPECT_EQ(rpbandit::ReadFile(out / "plotdata.csv"), plot);

  // Resume leaves finished traces alone.
  const std::string before = rpbandit::ReadFile(out / "traces/robust_3.json");
  ASSERT_EQ(Cli("run --config " + (dir / "exp.json").string() + " --out " + out.string() +
                " --seeds 3,9 --resume"),
            0);
  EXPECT_EQ(rpbandit::ReadFile(out / "traces/robust_3.json"), before);
}

TEST(Cli, EnvironmentOverrides) {
  const fs::path dir = TempDir("env");
  ASSERT_EQ(Cli("gen-instance --dim 2 --actions 4 --out " + (dir / "inst.json").string()), 0);
  WriteConfig(dir);
  const fs::path out = dir / "from_env";
  ASSERT_EQ(Cli("run --config " + (dir / "exp.json").string() + " --seeds 1",
                "RPBANDIT_OUT_DIR=" + out.string() + " RPBANDIT_WORKERS=2"),
            0);
  EXPECT_TRUE(fs::exists(out / "traces" / "robust_0.json"));
}

TEST(Cli, InvalidConfigExitsNonZero) {
  const fs::path dir = TempDir("invalid");
  std::ofstream(dir / "bad.json") << R"({"version": 1, "horizon": 10, "seeds": 1, "x": 2})";
  EXPECT_EQ(Cli("run --config " + (dir / "bad.json").string() + " --out " +
                (dir / "o").string()),
            2);
  EXPECT_NE(Cli("frobnicate"), 0);
}

TEST(Cli, SchemaAndDesign) {
  const fs::path dir = TempDir("design");
  std::ofstream(dir / "acts.json") << R"({"dim": 2, "actions": [[1, 0], [0, 1], [0.6, 0.8]]})";
  EXPECT_EQ(Cli("design --actions " + (dir / "acts.json").string()), 0);
  EXPECT_EQ(Cli("schema"), 0);
}

}  // namespace
