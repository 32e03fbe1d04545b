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

#include "rpbandit/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json_codec.hpp"
#include "rpbandit/errors.hpp"

namespace rpbandit {

namespace internal {

namespace {

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kConfigInvalid, where + ": " + what);
}

Json IntVector(const std::vector<int>& v) {
  Json out = Json::array();
  for (int x : v) out.push_back(x);
  return out;
}

std::vector<int> IntVectorFromJson(const Json& j) {
  std::vector<int> out;
  for (const auto& x : j) out.push_back(x.get<int>());
  return out;
}

}  // namespace

void RejectUnknownKeys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) Fail(where, "expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || item.key() == key;
    if (!ok) Fail(where + "." + item.key(), "unknown key");
  }
}

Json ToJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector VectorFromJson(const Json& j, const std::string& where) {
  if (!j.is_array()) Fail(where, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) Fail(where, "expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Json ToJson(const ActionSet& actions) {
  Json rows = Json::array();
  for (int a = 0; a < actions.size(); ++a) rows.push_back(ToJson(Vector(actions.action(a))));
  return Json{{"dim", actions.dim()}, {"actions", rows}};
}

ActionSet ActionSetFromJson(const Json& j, const std::filesystem::path& base_dir,
                            const std::string& where) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return ActionSetFromJson(Json::parse(ReadFile(p)), p.parent_path(),
                             p.string());
  }
  Json rows;
  std::optional<int> dim;
  if (j.is_object()) {
    RejectUnknownKeys(j, {"dim", "actions"}, where);
    if (!j.contains("actions")) Fail(where, "missing 'actions'");
    rows = j.at("actions");
    if (j.contains("dim")) {
      if (!j.at("dim").is_number_integer()) Fail(where + ".dim", "expected an integer");
      dim = j.at("dim").get<int>();
    }
  } else {
    rows = j;
  }
  if (!rows.is_array() || rows.empty()) Fail(where, "expected a non-empty list of actions");
  std::vector<std::vector<double>> parsed;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Vector v = VectorFromJson(rows[i], where + ".actions[" + std::to_string(i) + "]");
    if (dim && v.size() != *dim) {
      Fail(where + ".actions[" + std::to_string(i) + "]",
           "length " + std::to_string(v.size()) + " does not match dim " +
               std::to_string(*dim));
    }
    parsed.emplace_back(v.data(), v.data() + v.size());
  }
  try {
    return ActionSet::FromRows(parsed);
  } catch (const Error& e) {
    Fail(where, e.what());
  }
}

Json ToJson(const BanditInstance& instance) {
  return Json{{"theta_star", ToJson(instance.theta_star)},
              {"actions", ToJson(instance.actions)},
              {"noise", ToString(instance.noise)}};
}

BanditInstance InstanceFromJson(const Json& j, const std::filesystem::path& base_dir,
                                const std::string& where) {
  RejectUnknownKeys(j, {"theta_star", "actions", "noise"}, where);
  if (!j.contains("theta_star")) Fail(where, "missing 'theta_star'");
  if (!j.contains("actions")) Fail(where, "missing 'actions'");
  NoiseKind noise = NoiseKind::kGaussian;
  if (j.contains("noise")) {
    if (!j.at("noise").is_string()) Fail(where + ".noise", "expected a string");
    try {
      noise = ParseNoiseKind(j.at("noise").get<std::string>());
    } catch (const Error& e) {
      Fail(where + ".noise", e.what());
    }
  }
  BanditInstance instance{VectorFromJson(j.at("theta_star"), where + ".theta_star"),
                          ActionSetFromJson(j.at("actions"), base_dir, where + ".actions"),
                          noise};
  try {
    instance.Validate();
  } catch (const Error& e) {
    Fail(where, e.what());
  }
  return instance;
}

Json ToJson(const FilterDiagnostics& d) {
  return Json{{"removed_count", d.removed_count},
              {"final_top_eigenvalue", d.final_top_eigenvalue},
              {"iterations", d.iterations},
              {"removed", IntVector(d.removed)}};
}

Json ToJson(const RegretTrace& trace) {
  Json rounds = Json::array();
  for (const RoundRecord& r : trace.rounds) {
    rounds.push_back(Json{{"round", r.round},
                          {"exploration", r.exploration},
                          {"budget", r.budget},
                          {"batch_size", r.batch_size},
                          {"support_size", r.support_size},
                          {"reports", r.reports},
                          {"gamma", r.gamma},
                          {"lambda", r.lambda},
                          {"active_before", IntVector(r.active_before)},
                          {"active_after", IntVector(r.active_after)},
                          {"estimate", ToJson(r.estimate)},
                          {"committed_action", r.committed_action},
                          {"filter", ToJson(r.filter)},
                          {"filter_failed", r.filter_failed},
                          {"filter_error", r.filter_error},
                          {"cumulative_plays", r.cumulative_plays},
                          {"cumulative_regret", r.cumulative_regret}});
  }
  Json plays = Json::array();
  for (const PlaySegment& s : trace.plays) {
    plays.push_back(Json::array({s.action, s.count, s.regret}));
  }
  return Json{{"total_plays", trace.total_plays},
              {"cumulative_regret", trace.cumulative_regret},
              {"rounds", rounds},
              {"plays", plays}};
}

RegretTrace TraceFromJson(const Json& j) {
  RegretTrace trace;
  trace.total_plays = j.at("total_plays").get<std::int64_t>();
  trace.cumulative_regret = j.at("cumulative_regret").get<double>();
  for (const Json& r : j.at("rounds")) {
    RoundRecord rec;
    rec.round = r.at("round").get<int>();
    rec.exploration = r.at("exploration").get<bool>();
    rec.budget = r.at("budget").get<std::int64_t>();
    rec.batch_size = r.at("batch_size").get<std::int64_t>();
    rec.support_size = r.at("support_size").get<int>();
    rec.reports = r.at("reports").get<int>();
    rec.gamma = r.at("gamma").get<double>();
    rec.lambda = r.at("lambda").get<double>();
    rec.active_before = IntVectorFromJson(r.at("active_before"));
    rec.active_after = IntVectorFromJson(r.at("active_after"));
    rec.estimate = VectorFromJson(r.at("estimate"), "estimate");
    rec.committed_action = r.at("committed_action").get<int>();
    const Json& f = r.at("filter");
    rec.filter.removed_count = f.at("removed_count").get<int>();
    rec.filter.final_top_eigenvalue = f.at("final_top_eigenvalue").get<double>();
    rec.filter.iterations = f.at("iterations").get<int>();
    rec.filter.removed = IntVectorFromJson(f.at("removed"));
    rec.filter_failed = r.at("filter_failed").get<bool>();
    rec.filter_error = r.at("filter_error").get<std::string>();
    rec.cumulative_plays = r.at("cumulative_plays").get<std::int64_t>();
    rec.cumulative_regret = r.at("cumulative_regret").get<double>();
    trace.rounds.push_back(std::move(rec));
  }
  for (const Json& s : j.at("plays")) {
    trace.plays.push_back(
        {s.at(0).get<int>(), s.at(1).get<std::int64_t>(), s.at(2).get<double>()});
  }
  return trace;
}

}  // namespace internal

using internal::Json;

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFileAtomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

Json ParseOrThrow(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, what + ": " + e.what());
  }
}

}  // namespace

ActionSet ParseActionSet(const std::string& json_text) {
  return internal::ActionSetFromJson(ParseOrThrow(json_text, "action set"), {},
                                     "action set");
}

ActionSet LoadActionSet(const std::filesystem::path& path) {
  return internal::ActionSetFromJson(ParseOrThrow(ReadFile(path), path.string()),
                                     path.parent_path(), path.string());
}

std::string ActionSetToJson(const ActionSet& actions) {
  return internal::ToJson(actions).dump(2) + "\n";
}

std::string DesignToJson(const Design& design) {
  Json weights = Json::object();
  for (std::size_t a = 0; a < design.weights.size(); ++a) {
    if (design.weights[a] > 0.0) weights[std::to_string(a)] = design.weights[a];
  }
  return Json{{"effective_dim", design.effective_dim},
              {"gvalue", design.gvalue},
              {"iterations", design.iterations},
              {"weights", weights}}
             .dump(2) +
         "\n";
}

BanditInstance ParseInstance(const std::string& json_text,
                             const std::filesystem::path& base_dir) {
  return internal::InstanceFromJson(ParseOrThrow(json_text, "instance"), base_dir,
                                    "instance");
}

std::string InstanceToJson(const BanditInstance& instance) {
  return internal::ToJson(instance).dump(2) + "\n";
}

std::string FilterDiagnosticsToJson(const FilterDiagnostics& diagnostics) {
  return internal::ToJson(diagnostics).dump();
}

std::string TraceToJson(const RegretTrace& trace) {
  return internal::ToJson(trace).dump() + "\n";
}

RegretTrace ParseTrace(const std::string& json_text) {
  return internal::TraceFromJson(ParseOrThrow(json_text, "trace"));
}

std::string TraceToCsv(const RegretTrace& trace) {
  std::string out = "round,m,gamma,active,cumulative_regret,filter_removed\n";
  for (const RoundRecord& r : trace.rounds) {
    out += std::to_string(r.round) + "," + std::to_string(r.budget) + "," +
           FormatDouble(r.gamma) + "," + std::to_string(r.active_after.size()) + "," +
           FormatDouble(r.cumulative_regret) + "," +
           std::to_string(r.filter.removed_count) + "\n";
  }
  return out;
}

}  // namespace rpbandit
