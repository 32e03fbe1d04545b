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

#include "rpbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json_codec.hpp"
#include "rpbandit/errors.hpp"
#include "rpbandit/serialize.hpp"

namespace rpbandit {

using internal::Json;

namespace {

const char kSchema[] = R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "$id": "rpbandit/experiment-config/v1",
  "type": "object",
  "additionalProperties": false,
  "required": ["version", "instance", "horizon", "seeds"],
  "properties": {
    "version": {"const": 1},
    "instance": {
      "oneOf": [
        {"type": "string"},
        {"type": "object", "additionalProperties": false,
         "required": ["theta_star", "actions"],
         "properties": {
           "theta_star": {"type": "array", "items": {"type": "number"}},
           "actions": {},
           "noise": {"enum": ["gaussian", "uniform", "zero"]}}},
        {"type": "object", "additionalProperties": false, "required": ["random"],
         "properties": {"random": {"type": "object", "additionalProperties": false,
           "required": ["dim", "actions"],
           "properties": {
             "dim": {"type": "integer", "minimum": 1},
             "actions": {"type": "integer", "minimum": 1},
             "theta_norm": {"type": "number", "minimum": 0, "maximum": 1},
             "noise": {"enum": ["gaussian", "uniform", "zero"]},
             "seed": {"type": "integer", "minimum": 0}}}}}
      ]
    },
    "horizon": {"type": "integer", "minimum": 1},
    "batches": {"type": "integer", "minimum": 2},
    "model": {"enum": ["M1", "M2"]},
    "adversary": {"type": "object", "additionalProperties": false,
      "properties": {
        "alpha": {"type": "number", "minimum": 0, "exclusiveMaximum": 0.25},
        "strategy": {"enum": ["none", "constant", "large-positive", "sign-flip", "anti-optimal"]},
        "magnitude": {"type": "number", "minimum": -100, "maximum": 100},
        "stage": {"enum": ["pre-privacy", "post-privacy"]},
        "m2_target": {"enum": ["raw", "aggregate"]}}},
    "privacy": {"type": "object", "additionalProperties": false,
      "properties": {
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "enabled": {"type": "boolean"},
        "clip": {"type": ["number", "null"], "exclusiveMinimum": 0}}},
    "thresholds": {"type": "object", "additionalProperties": false,
      "properties": {
        "c_gamma": {"type": "number", "exclusiveMinimum": 0},
        "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "alpha": {"type": "number", "minimum": 0, "exclusiveMaximum": 0.25},
        "nu": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "indexing": {"enum": ["algorithm", "proof"]}}},
    "design": {"type": "object", "additionalProperties": false,
      "properties": {
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iters": {"type": "integer", "minimum": 1},
        "support_constant": {"type": "number", "exclusiveMinimum": 0}}},
    "robust": {"type": "object", "additionalProperties": false,
      "properties": {"lambda_reward_clip": {"type": ["number", "null"], "exclusiveMinimum": 0}}},
    "master_seed": {"type": "integer", "minimum": 0},
    "seeds": {"oneOf": [
      {"type": "integer", "minimum": 1},
      {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}]},
    "baselines": {"type": "array", "uniqueItems": true,
      "items": {"enum": ["vanilla", "non-private", "non-robust"]}},
    "checkpoints": {"type": "array", "items": {"type": "integer", "minimum": 0}}
  }
}
)";

[[noreturn]] void Invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kConfigInvalid, field + ": " + what);
}

double GetNumber(const Json& obj, const char* key, const std::string& where,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) Invalid(where + "." + key, "expected a number");
  return v.get<double>();
}

std::int64_t GetInteger(const Json& obj, const char* key, const std::string& where,
                        std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) Invalid(where + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t GetSeed(const Json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    Invalid(where, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string GetString(const Json& obj, const char* key, const std::string& where,
                      const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_string()) Invalid(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::optional<double> GetOptionalPositive(const Json& obj, const char* key,
                                          const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  const double v = GetNumber(obj, key, where, 0.0);
  if (!(v > 0.0)) Invalid(where + "." + key, "must be positive or null");
  return v;
}

template <typename Fn>
auto Parsed(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    Invalid(field, e.what());
  }
}

std::string VariantFileStem(Variant v, std::uint64_t seed) {
  return ToString(v) + "_" + std::to_string(seed);
}

}  // namespace

const std::string& ConfigSchemaJson() {
  static const std::string schema(kSchema);
  return schema;
}

std::string ToString(Variant variant) {
  switch (variant) {
    case Variant::kRobust:
      return "robust";
    case Variant::kVanilla:
      return "vanilla";
    case Variant::kNonPrivate:
      return "non-private";
    case Variant::kNonRobust:
      return "non-robust";
  }
  return "robust";
}

Variant ParseVariant(const std::string& text) {
  if (text == "robust") return Variant::kRobust;
  if (text == "vanilla") return Variant::kVanilla;
  if (text == "non-private") return Variant::kNonPrivate;
  if (text == "non-robust") return Variant::kNonRobust;
  throw Error(ErrorCode::kConfigInvalid, "unknown variant '" + text + "'");
}

Schedule ExperimentConfig::MakeSchedule() const {
  return Schedule::Make(horizon, batches.value_or(Schedule::DefaultBatches(horizon)));
}

std::vector<Variant> ExperimentConfig::Variants() const {
  std::vector<Variant> out{Variant::kRobust};
  out.insert(out.end(), baselines.begin(), baselines.end());
  return out;
}

ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::filesystem::path& base_dir) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    Invalid("config", e.what());
  }
  internal::RejectUnknownKeys(
      root,
      {"version", "instance", "horizon", "batches", "model", "adversary", "privacy",
       "thresholds", "design", "robust", "master_seed", "seeds", "baselines",
       "checkpoints"},
      "config");

  ExperimentConfig cfg;
  if (!root.contains("version")) Invalid("config.version", "missing");
  cfg.version = static_cast<int>(GetInteger(root, "version", "config", 0));
  if (cfg.version != kConfigSchemaVersion) {
    Invalid("config.version", "unsupported version " + std::to_string(cfg.version));
  }

  if (!root.contains("instance")) Invalid("config.instance", "missing");
  const Json& inst = root.at("instance");
  if (inst.is_string()) {
    std::filesystem::path p = inst.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.instance = Parsed("config.instance", [&] {
      return internal::InstanceFromJson(Json::parse(ReadFile(p)), p.parent_path(),
                                        "config.instance");
    });
  } else if (inst.is_object() && inst.contains("random")) {
    internal::RejectUnknownKeys(inst, {"random"}, "config.instance");
    const Json& r = inst.at("random");
    const std::string where = "config.instance.random";
    internal::RejectUnknownKeys(r, {"dim", "actions", "theta_norm", "noise", "seed"}, where);
    if (!r.contains("dim")) Invalid(where + ".dim", "missing");
    if (!r.contains("actions")) Invalid(where + ".actions", "missing");
    const auto dim = GetInteger(r, "dim", where, 0);
    const auto num = GetInteger(r, "actions", where, 0);
    const double theta_norm = GetNumber(r, "theta_norm", where, 1.0);
    const NoiseKind noise = Parsed(where + ".noise", [&] {
      return ParseNoiseKind(GetString(r, "noise", where, "gaussian"));
    });
    const std::uint64_t seed = r.contains("seed") ? GetSeed(r.at("seed"), where + ".seed") : 0;
    cfg.instance = Parsed(where, [&] {
      return RandomInstance(static_cast<int>(dim), static_cast<int>(num), theta_norm,
                            noise, seed);
    });
  } else {
    cfg.instance = internal::InstanceFromJson(inst, base_dir, "config.instance");
  }

  if (!root.contains("horizon")) Invalid("config.horizon", "missing");
  cfg.horizon = GetInteger(root, "horizon", "config", 0);
  if (cfg.horizon < 1) Invalid("config.horizon", "must be >= 1");
  if (root.contains("batches")) {
    cfg.batches = static_cast<int>(GetInteger(root, "batches", "config", 0));
    if (*cfg.batches < 2) Invalid("config.batches", "must be >= 2");
  }
  cfg.model = Parsed("config.model", [&] {
    return ParseClientModel(GetString(root, "model", "config", "M1"));
  });

  if (root.contains("adversary")) {
    const Json& a = root.at("adversary");
    const std::string where = "config.adversary";
    internal::RejectUnknownKeys(a, {"alpha", "strategy", "magnitude", "stage", "m2_target"},
                                where);
    cfg.adversary.alpha = GetNumber(a, "alpha", where, 0.0);
    cfg.adversary.strategy = Parsed(where + ".strategy", [&] {
      return ParseStrategy(GetString(a, "strategy", where, "none"));
    });
    cfg.adversary.magnitude = GetNumber(a, "magnitude", where, 0.0);
    const std::string stage = GetString(a, "stage", where, "pre-privacy");
    if (stage == "pre-privacy") {
      cfg.adversary.stage = CorruptStage::kPrePrivacy;
    } else if (stage == "post-privacy") {
      cfg.adversary.stage = CorruptStage::kPostPrivacy;
    } else {
      Invalid(where + ".stage", "expected 'pre-privacy' or 'post-privacy'");
    }
    const std::string target = GetString(a, "m2_target", where, "raw");
    if (target == "raw") {
      cfg.adversary.m2_target = AggregateCorruption::kRawDraws;
    } else if (target == "aggregate") {
      cfg.adversary.m2_target = AggregateCorruption::kAggregateReport;
    } else {
      Invalid(where + ".m2_target", "expected 'raw' or 'aggregate'");
    }
    Parsed(where, [&] {
      cfg.adversary.Validate();
      return 0;
    });
  }

  if (root.contains("privacy")) {
    const Json& p = root.at("privacy");
    const std::string where = "config.privacy";
    internal::RejectUnknownKeys(p, {"epsilon", "enabled", "clip"}, where);
    cfg.privacy.epsilon = GetNumber(p, "epsilon", where, 1.0);
    if (p.contains("enabled")) {
      if (!p.at("enabled").is_boolean()) Invalid(where + ".enabled", "expected a boolean");
      cfg.privacy.enabled = p.at("enabled").get<bool>();
    }
    cfg.privacy.clip = GetOptionalPositive(p, "clip", where);
    Parsed(where, [&] {
      cfg.privacy.Validate();
      return 0;
    });
  }

  cfg.thresholds.alpha = cfg.adversary.alpha;
  if (root.contains("thresholds")) {
    const Json& t = root.at("thresholds");
    const std::string where = "config.thresholds";
    internal::RejectUnknownKeys(t, {"c_gamma", "delta", "alpha", "nu", "indexing"}, where);
    cfg.thresholds.c_gamma = GetNumber(t, "c_gamma", where, cfg.thresholds.c_gamma);
    cfg.thresholds.delta = GetNumber(t, "delta", where, cfg.thresholds.delta);
    cfg.thresholds.alpha = GetNumber(t, "alpha", where, cfg.thresholds.alpha);
    cfg.thresholds.nu = GetNumber(t, "nu", where, cfg.thresholds.nu);
    const std::string indexing = GetString(t, "indexing", where, "algorithm");
    if (indexing == "algorithm") {
      cfg.thresholds.indexing = ThresholdIndexing::kAlgorithm;
    } else if (indexing == "proof") {
      cfg.thresholds.indexing = ThresholdIndexing::kProof;
    } else {
      Invalid(where + ".indexing", "expected 'algorithm' or 'proof'");
    }
  }
  cfg.thresholds.model = cfg.model;
  cfg.thresholds.private_reports = cfg.privacy.enabled;
  cfg.thresholds.epsilon = cfg.privacy.epsilon;
  Parsed("config.thresholds", [&] {
    cfg.thresholds.Validate();
    return 0;
  });

  if (root.contains("design")) {
    const Json& d = root.at("design");
    const std::string where = "config.design";
    internal::RejectUnknownKeys(d, {"tol", "max_iters", "support_constant"}, where);
    cfg.design.tol = GetNumber(d, "tol", where, cfg.design.tol);
    cfg.design.max_iters = static_cast<int>(GetInteger(d, "max_iters", where, cfg.design.max_iters));
    cfg.design.support_constant =
        GetNumber(d, "support_constant", where, cfg.design.support_constant);
    if (!(cfg.design.tol > 0.0)) Invalid(where + ".tol", "must be positive");
    if (cfg.design.max_iters < 1) Invalid(where + ".max_iters", "must be >= 1");
    if (!(cfg.design.support_constant > 0.0)) {
      Invalid(where + ".support_constant", "must be positive");
    }
  }

  if (root.contains("robust")) {
    const Json& r = root.at("robust");
    internal::RejectUnknownKeys(r, {"lambda_reward_clip"}, "config.robust");
    cfg.robust.lambda_reward_clip =
        GetOptionalPositive(r, "lambda_reward_clip", "config.robust");
  }

  if (root.contains("master_seed")) {
    cfg.master_seed = GetSeed(root.at("master_seed"), "config.master_seed");
  }

  if (!root.contains("seeds")) Invalid("config.seeds", "missing");
  const Json& seeds = root.at("seeds");
  if (seeds.is_number_integer()) {
    const auto count = seeds.get<std::int64_t>();
    if (count < 1) Invalid("config.seeds", "count must be >= 1");
    for (std::int64_t s = 0; s < count; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
  } else if (seeds.is_array() && !seeds.empty()) {
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      cfg.seeds.push_back(GetSeed(seeds[i], "config.seeds[" + std::to_string(i) + "]"));
    }
    std::vector<std::uint64_t> sorted = cfg.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      Invalid("config.seeds", "duplicate seed");
    }
  } else {
    Invalid("config.seeds", "expected a positive count or a non-empty list");
  }

  if (root.contains("baselines")) {
    const Json& b = root.at("baselines");
    if (!b.is_array()) Invalid("config.baselines", "expected an array");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string field = "config.baselines[" + std::to_string(i) + "]";
      if (!b[i].is_string()) Invalid(field, "expected a string");
      const Variant v = Parsed(field, [&] { return ParseVariant(b[i].get<std::string>()); });
      if (v == Variant::kRobust) Invalid(field, "'robust' always runs; not a baseline");
      if (std::find(cfg.baselines.begin(), cfg.baselines.end(), v) != cfg.baselines.end()) {
        Invalid(field, "duplicate baseline");
      }
      cfg.baselines.push_back(v);
    }
  }

  if (root.contains("checkpoints")) {
    const Json& c = root.at("checkpoints");
    if (!c.is_array()) Invalid("config.checkpoints", "expected an array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      const std::string field = "config.checkpoints[" + std::to_string(i) + "]";
      if (!c[i].is_number_integer()) Invalid(field, "expected an integer");
      const auto v = c[i].get<std::int64_t>();
      if (v < 0 || v > cfg.horizon) Invalid(field, "must lie in [0, horizon]");
      cfg.checkpoints.push_back(v);
    }
  } else {
    for (int part = 1; part <= 4; ++part) cfg.checkpoints.push_back(cfg.horizon * part / 4);
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  return ParseConfig(ReadFile(path), path.parent_path());
}

std::string ConfigToJson(const ExperimentConfig& config) {
  Json seeds = Json::array();
  for (auto s : config.seeds) seeds.push_back(s);
  Json baselines = Json::array();
  for (Variant v : config.baselines) baselines.push_back(ToString(v));
  Json checkpoints = Json::array();
  for (auto c : config.checkpoints) checkpoints.push_back(c);
  Json root{
      {"version", config.version},
      {"instance", internal::ToJson(config.instance)},
      {"horizon", config.horizon},
  };
  if (config.batches) root["batches"] = *config.batches;
  root["model"] = ToString(config.model);
  root["adversary"] = Json{
      {"alpha", config.adversary.alpha},
      {"strategy", ToString(config.adversary.strategy)},
      {"magnitude", config.adversary.magnitude},
      {"stage", config.adversary.stage == CorruptStage::kPrePrivacy ? "pre-privacy"
                                                                     : "post-privacy"},
      {"m2_target", config.adversary.m2_target == AggregateCorruption::kRawDraws
                        ? "raw"
                        : "aggregate"}};
  root["privacy"] = Json{{"epsilon", config.privacy.epsilon},
                         {"enabled", config.privacy.enabled},
                         {"clip", config.privacy.clip ? Json(*config.privacy.clip) : Json()}};
  root["thresholds"] = Json{
      {"c_gamma", config.thresholds.c_gamma},
      {"delta", config.thresholds.delta},
      {"alpha", config.thresholds.alpha},
      {"nu", config.thresholds.nu},
      {"indexing", config.thresholds.indexing == ThresholdIndexing::kAlgorithm ? "algorithm"
                                                                               : "proof"}};
  root["design"] = Json{{"tol", config.design.tol},
                        {"max_iters", config.design.max_iters},
                        {"support_constant", config.design.support_constant}};
  root["robust"] = Json{{"lambda_reward_clip", config.robust.lambda_reward_clip
                                                   ? Json(*config.robust.lambda_reward_clip)
                                                   : Json()}};
  root["master_seed"] = config.master_seed;
  root["seeds"] = seeds;
  root["baselines"] = baselines;
  root["checkpoints"] = checkpoints;
  return root.dump(2) + "\n";
}

ExperimentConfig ParseManifestConfig(const std::string& manifest_text) {
  Json manifest;
  try {
    manifest = Json::parse(manifest_text);
  } catch (const Json::parse_error& e) {
    Invalid("manifest", e.what());
  }
  if (!manifest.is_object() || !manifest.contains("config")) {
    Invalid("manifest.config", "missing");
  }
  return ParseConfig(manifest.at("config").dump());
}

RegretTrace RunCell(const ExperimentConfig& config, Variant variant,
                    std::uint64_t seed) {
  const std::uint64_t tag = TagHash(ToString(variant).c_str());
  PrivacyParams privacy = config.privacy;
  PolicyOptions options;
  options.thresholds = config.thresholds;
  options.design = config.design;
  options.robust = config.robust;
  if (variant == Variant::kNonPrivate) {
    privacy.enabled = false;
    options.thresholds.private_reports = false;
  }
  if (variant == Variant::kNonRobust) options.thresholds.alpha = 0.0;

  Environment env(config.instance, config.adversary, privacy, config.model,
                  Stream(MixSeed(config.master_seed, {seed, tag, TagHash("env")})));
  const Stream learner(MixSeed(config.master_seed, {seed, tag, TagHash("learner")}));
  const Schedule schedule = config.MakeSchedule();
  if (variant == Variant::kVanilla) {
    return RunVanillaElimination(env, schedule, options, learner);
  }
  return RunElimination(env, schedule, options, learner);
}

std::string CellToJson(const CellResult& cell) {
  Json j{{"variant", ToString(cell.variant)},
         {"seed", cell.seed},
         {"status", cell.error.empty() ? "ok" : "error"},
         {"error", cell.error},
         {"optimal_survived", cell.optimal_survived}};
  j["trace"] = cell.trace ? internal::ToJson(*cell.trace) : Json();
  return j.dump() + "\n";
}

CellResult ParseCell(const std::string& json_text) {
  try {
    const Json j = Json::parse(json_text);
    CellResult cell;
    cell.variant = ParseVariant(j.at("variant").get<std::string>());
    cell.seed = j.at("seed").get<std::uint64_t>();
    cell.error = j.at("error").get<std::string>();
    cell.optimal_survived = j.at("optimal_survived").get<bool>();
    if (!j.at("trace").is_null()) cell.trace = internal::TraceFromJson(j.at("trace"));
    return cell;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("malformed trace file: ") + e.what());
  }
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile of empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<SummaryRow> Summarize(const std::vector<CellResult>& cells,
                                  const std::vector<std::int64_t>& checkpoints) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RegretTrace*>> by_variant;
  for (const CellResult& c : cells) {
    if (!c.trace) continue;
    const std::string name = ToString(c.variant);
    if (!by_variant.count(name)) order.push_back(name);
    by_variant[name].push_back(&*c.trace);
  }
  std::vector<SummaryRow> rows;
  for (const std::string& name : order) {
    for (std::int64_t cp : checkpoints) {
      std::vector<double> values;
      for (const RegretTrace* t : by_variant[name]) values.push_back(t->CumulativeAt(cp));
      SummaryRow row;
      row.variant = name;
      row.checkpoint = cp;
      row.count = static_cast<int>(values.size());
      double sum = 0.0;
      for (double v : values) sum += v;
      row.mean = sum / static_cast<double>(values.size());
      row.median = Quantile(values, 0.5);
      row.q25 = Quantile(values, 0.25);
      row.q75 = Quantile(values, 0.75);
      row.iqr = row.q75 - row.q25;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string SummaryToCsv(const std::vector<SummaryRow>& rows) {
  std::string out = "variant,checkpoint,count,mean,median,q25,q75,iqr\n";
  for (const SummaryRow& r : rows) {
    out += r.variant + "," + std::to_string(r.checkpoint) + "," + std::to_string(r.count) +
           "," + FormatDouble(r.mean) + "," + FormatDouble(r.median) + "," +
           FormatDouble(r.q25) + "," + FormatDouble(r.q75) + "," + FormatDouble(r.iqr) +
           "\n";
  }
  return out;
}

std::string SummaryToText(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "variant" << std::right << std::setw(12)
     << "checkpoint" << std::setw(7) << "runs" << std::setw(14) << "mean" << std::setw(14)
     << "median" << std::setw(14) << "iqr" << "\n";
  os << std::fixed << std::setprecision(3);
  for (const SummaryRow& r : rows) {
    os << std::left << std::setw(12) << r.variant << std::right << std::setw(12)
       << r.checkpoint << std::setw(7) << r.count << std::setw(14) << r.mean
       << std::setw(14) << r.median << std::setw(14) << r.iqr << "\n";
  }
  return os.str();
}

std::string PlotDataCsv(const std::vector<CellResult>& cells) {
  std::string out = "variant,seed,plays,cumulative_regret\n";
  for (const CellResult& c : cells) {
    if (!c.trace) continue;
    for (const RoundRecord& r : c.trace->rounds) {
      out += ToString(c.variant) + "," + std::to_string(c.seed) + "," +
             std::to_string(r.cumulative_plays) + "," + FormatDouble(r.cumulative_regret) +
             "\n";
    }
  }
  return out;
}

std::vector<CellResult> LoadCells(const std::filesystem::path& out_dir) {
  const std::filesystem::path dir = out_dir / "traces";
  std::vector<std::filesystem::path> files;
  if (std::filesystem::exists(dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<CellResult> cells;
  for (const auto& f : files) cells.push_back(ParseCell(ReadFile(f)));

  // Put cells in sweep order when the manifest is there, so summaries built
  // from disk match the ones written by the sweep byte for byte.
  const std::filesystem::path manifest = out_dir / "manifest.json";
  if (!std::filesystem::exists(manifest)) return cells;
  const ExperimentConfig config = ParseManifestConfig(ReadFile(manifest));
  std::vector<CellResult> ordered;
  std::vector<bool> taken(cells.size(), false);
  for (std::uint64_t seed : config.seeds) {
    for (Variant v : config.Variants()) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!taken[i] && cells[i].variant == v && cells[i].seed == seed) {
          taken[i] = true;
          ordered.push_back(std::move(cells[i]));
        }
      }
    }
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!taken[i]) ordered.push_back(std::move(cells[i]));
  }
  return ordered;
}

namespace {

std::string ManifestJson(const ExperimentConfig& config,
                         const std::vector<std::optional<CellResult>>& done,
                         const std::vector<std::pair<Variant, std::uint64_t>>& plan) {
  Json cells = Json::array();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!done[i]) continue;
    const CellResult& c = *done[i];
    cells.push_back(Json{{"variant", ToString(c.variant)},
                         {"seed", c.seed},
                         {"status", c.error.empty() ? "ok" : "error"},
                         {"error", c.error},
                         {"file", "traces/" + VariantFileStem(c.variant, c.seed) + ".json"}});
  }
  return Json{{"schema_version", kConfigSchemaVersion},
              {"config", Json::parse(ConfigToJson(config))},
              {"cells", cells}}
             .dump(2) +
         "\n";
}

}  // namespace

SweepResult RunSweep(const ExperimentConfig& config, const SweepOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<Variant, std::uint64_t>> plan;
  for (std::uint64_t seed : config.seeds) {
    for (Variant v : config.Variants()) plan.emplace_back(v, seed);
  }
  const bool persist = !options.out_dir.empty();
  const int optimal = config.instance.OptimalAction();
  std::vector<std::optional<CellResult>> done(plan.size());

  if (persist) {
    std::filesystem::create_directories(options.out_dir / "traces");
    if (options.resume) {
      for (std::size_t i = 0; i < plan.size(); ++i) {
        const auto file = options.out_dir / "traces" /
                          (VariantFileStem(plan[i].first, plan[i].second) + ".json");
        if (!std::filesystem::exists(file)) continue;
        try {
          done[i] = ParseCell(ReadFile(file));
        } catch (const Error&) {
          // Unreadable leftovers are recomputed.
        }
      }
    }
  }

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (done[i]) continue;
      }
      CellResult cell;
      cell.variant = plan[i].first;
      cell.seed = plan[i].second;
      try {
        cell.trace = RunCell(config, cell.variant, cell.seed);
        const auto& final_active = cell.trace->rounds.back().active_after;
        cell.optimal_survived = std::find(final_active.begin(), final_active.end(),
                                          optimal) != final_active.end();
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      std::lock_guard<std::mutex> lock(mu);
      if (persist) {
        const auto stem = options.out_dir / "traces" / VariantFileStem(cell.variant, cell.seed);
        if (cell.trace) {
          WriteFileAtomic(stem.string() + ".csv", TraceToCsv(*cell.trace));
        }
        WriteFileAtomic(stem.string() + ".json", CellToJson(cell));
      }
      done[i] = std::move(cell);
      if (persist) {
        WriteFileAtomic(options.out_dir / "manifest.json", ManifestJson(config, done, plan));
      }
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  for (const auto& c : done) result.cells.push_back(*c);
  result.aggregates = Summarize(result.cells, config.checkpoints);
  for (Variant v : config.Variants()) {
    int ok = 0;
    int survived = 0;
    for (const CellResult& c : result.cells) {
      if (c.variant != v || !c.trace) continue;
      ++ok;
      survived += c.optimal_survived ? 1 : 0;
    }
    result.survival_rate.emplace_back(ToString(v), ok > 0 ? double(survived) / ok : 0.0);
  }
  if (persist) {
    WriteFileAtomic(options.out_dir / "manifest.json", ManifestJson(config, done, plan));
    WriteFileAtomic(options.out_dir / "summary.csv", SummaryToCsv(result.aggregates));
    WriteFileAtomic(options.out_dir / "plotdata.csv", PlotDataCsv(result.cells));
  }
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace rpbandit
