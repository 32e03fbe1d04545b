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

#ifndef RPBANDIT_SERIALIZE_HPP_
#define RPBANDIT_SERIALIZE_HPP_

#include <filesystem>
#include <string>

#include "rpbandit/design.hpp"
#include "rpbandit/env.hpp"
#include "rpbandit/policy.hpp"
#include "rpbandit/robust.hpp"

// JSON and CSV encodings. Doubles are written in shortest round-trip form so
// that equal values always produce identical bytes.
namespace rpbandit {

// { "dim": d, "actions": [[...], ...] }
ActionSet ParseActionSet(const std::string& json_text);
ActionSet LoadActionSet(const std::filesystem::path& path);
std::string ActionSetToJson(const ActionSet& actions);

// { "effective_dim", "gvalue", "iterations", "weights": { "<index>": w } }
std::string DesignToJson(const Design& design);

// { "theta_star": [...], "actions": <inline rows | {dim, actions} | "path">,
//   "noise": "gaussian" | "uniform" | "zero" }
// Relative action-file paths resolve against `base_dir`.
BanditInstance ParseInstance(const std::string& json_text,
                             const std::filesystem::path& base_dir = {});
std::string InstanceToJson(const BanditInstance& instance);

std::string FilterDiagnosticsToJson(const FilterDiagnostics& diagnostics);

std::string TraceToJson(const RegretTrace& trace);
RegretTrace ParseTrace(const std::string& json_text);

// Per-round summary: round,m,gamma,active,cumulative_regret,filter_removed
std::string TraceToCsv(const RegretTrace& trace);

// Shortest decimal that round-trips to `value`.
std::string FormatDouble(double value);

std::string ReadFile(const std::filesystem::path& path);
// Writes through a temporary file and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace rpbandit

#endif  // RPBANDIT_SERIALIZE_HPP_
