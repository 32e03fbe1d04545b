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

#ifndef RPBANDIT_SRC_JSON_CODEC_HPP_
#define RPBANDIT_SRC_JSON_CODEC_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "rpbandit/design.hpp"
#include "rpbandit/env.hpp"
#include "rpbandit/policy.hpp"

namespace rpbandit::internal {

using Json = nlohmann::ordered_json;

Json ToJson(const Vector& v);
Vector VectorFromJson(const Json& j, const std::string& where);

Json ToJson(const ActionSet& actions);
ActionSet ActionSetFromJson(const Json& j, const std::filesystem::path& base_dir,
                            const std::string& where);

Json ToJson(const BanditInstance& instance);
BanditInstance InstanceFromJson(const Json& j, const std::filesystem::path& base_dir,
                                const std::string& where);

Json ToJson(const FilterDiagnostics& d);
Json ToJson(const RegretTrace& trace);
RegretTrace TraceFromJson(const Json& j);

// Throws Error(kConfigInvalid) naming `where` when `j` has keys outside
// `allowed`.
void RejectUnknownKeys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& where);

}  // namespace rpbandit::internal

#endif  // RPBANDIT_SRC_JSON_CODEC_HPP_
