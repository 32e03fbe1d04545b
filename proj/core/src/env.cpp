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

#include "rpbandit/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "rpbandit/errors.hpp"

namespace rpbandit {

std::string ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kGaussian:
      return "gaussian";
    case NoiseKind::kUniform:
      return "uniform";
    case NoiseKind::kZero:
      return "zero";
  }
  return "gaussian";
}

NoiseKind ParseNoiseKind(const std::string& text) {
  if (text == "gaussian") return NoiseKind::kGaussian;
  if (text == "uniform" || text == "uniform-bounded") return NoiseKind::kUniform;
  if (text == "zero" || text == "none") return NoiseKind::kZero;
  throw Error(ErrorCode::kInvalidArgument, "unknown noise kind '" + text + "'");
}

std::string ToString(Strategy strategy) {
  switch (strategy) {
    case Strategy::kNone:
      return "none";
    case Strategy::kConstant:
      return "constant";
    case Strategy::kLargePositive:
      return "large-positive";
    case Strategy::kSignFlip:
      return "sign-flip";
    case Strategy::kAntiOptimal:
      return "anti-optimal";
  }
  return "none";
}

Strategy ParseStrategy(const std::string& text) {
  if (text == "none") return Strategy::kNone;
  if (text == "constant") return Strategy::kConstant;
  if (text == "large-positive") return Strategy::kLargePositive;
  if (text == "sign-flip") return Strategy::kSignFlip;
  if (text == "anti-optimal") return Strategy::kAntiOptimal;
  throw Error(ErrorCode::kInvalidArgument, "unknown adversary strategy '" + text + "'");
}

void BanditInstance::Validate() const {
  if (theta_star.size() != actions.dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "theta_star has dimension " + std::to_string(theta_star.size()) +
                    " but actions have dimension " + std::to_string(actions.dim()));
  }
  if (!theta_star.allFinite() || theta_star.norm() > 1.0 + kActionNormSlack) {
    throw Error(ErrorCode::kInvalidArgument, "theta_star must have norm <= 1");
  }
}

double BanditInstance::MeanReward(int action) const {
  return actions.action(action).dot(theta_star);
}

int BanditInstance::OptimalAction() const {
  int best = 0;
  double best_value = MeanReward(0);
  for (int a = 1; a < actions.size(); ++a) {
    const double v = MeanReward(a);
    if (v > best_value) {
      best = a;
      best_value = v;
    }
  }
  return best;
}

double BanditInstance::DrawNoise(Stream& rng) const {
  switch (noise) {
    case NoiseKind::kGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
    case NoiseKind::kUniform:
      return 2.0 * rng.NextOpenUnit() - 1.0;
    case NoiseKind::kZero:
      return 0.0;
  }
  return 0.0;
}

BanditInstance RandomInstance(int dim, int num_actions, double theta_norm,
                              NoiseKind noise, std::uint64_t seed) {
  if (dim < 1 || num_actions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "dim and num_actions must be positive");
  }
  if (!(theta_norm >= 0.0 && theta_norm <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta_norm must lie in [0, 1]");
  }
  Stream rng(MixSeed(seed, {TagHash("instance")}));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto unit = [&]() {
    Vector v(dim);
    do {
      for (int i = 0; i < dim; ++i) v(i) = normal(rng);
    } while (v.norm() < 1e-12);
    return Vector(v / v.norm());
  };
  Matrix actions(dim, num_actions);
  for (int j = 0; j < num_actions; ++j) actions.col(j) = unit();
  BanditInstance instance{theta_norm * unit(), ActionSet(std::move(actions)), noise};
  return instance;
}

void AdversaryConfig::Validate() const {
  if (!(alpha >= 0.0 && alpha < 0.25)) {
    throw Error(ErrorCode::kInvalidArgument, "corruption alpha must lie in [0, 1/4)");
  }
  if (!std::isfinite(magnitude) || std::abs(magnitude) > kMaxCorruptionMagnitude) {
    throw Error(ErrorCode::kInvalidArgument, "corruption magnitude must be within 100");
  }
  const bool needs_positive = strategy == Strategy::kLargePositive ||
                              strategy == Strategy::kSignFlip ||
                              strategy == Strategy::kAntiOptimal;
  if (needs_positive && !(magnitude > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                ToString(strategy) + " needs a positive magnitude");
  }
}

namespace {

// Replacement value for a corrupted response on `action`.
double CorruptedValue(const AdversaryConfig& adv, int action, double clean,
                      int worst_action) {
  switch (adv.strategy) {
    case Strategy::kNone:
      return clean;
    case Strategy::kConstant:
      return adv.magnitude;
    case Strategy::kLargePositive:
      return std::abs(adv.magnitude);
    case Strategy::kSignFlip:
      return std::clamp(-clean, -adv.magnitude, adv.magnitude);
    case Strategy::kAntiOptimal:
      return action == worst_action ? adv.magnitude : -adv.magnitude;
  }
  return clean;
}

// Lowest clean sample mean among the batch's actions, lowest index on ties.
int EmpiricallyWorst(const std::map<int, std::pair<double, std::int64_t>>& sums) {
  int worst = -1;
  double worst_mean = std::numeric_limits<double>::infinity();
  for (const auto& [action, acc] : sums) {
    const double mean = acc.first / static_cast<double>(acc.second);
    if (mean < worst_mean) {
      worst = action;
      worst_mean = mean;
    }
  }
  return worst;
}

void CheckCoreset(const BanditInstance& instance, const Coreset& coreset,
                  ClientModel expected) {
  if (coreset.model != expected) {
    throw Error(ErrorCode::kInvalidArgument,
                "coreset built for " + ToString(coreset.model) + ", batch expects " +
                    ToString(expected));
  }
  for (const CoresetEntry& e : coreset.entries) {
    if (e.action < 0 || e.action >= instance.actions.size() || e.count < 1) {
      throw Error(ErrorCode::kInvalidArgument, "coreset entry out of range");
    }
  }
}

}  // namespace

std::vector<Observation> ObserveBatchM1(const BanditInstance& instance,
                                        const Coreset& coreset,
                                        const AdversaryConfig& adversary,
                                        const PrivacyParams& privacy,
                                        const Stream& rng) {
  CheckCoreset(instance, coreset, ClientModel::kM1);
  std::vector<Observation> out;
  out.reserve(static_cast<std::size_t>(coreset.total));
  std::vector<Stream> clients;
  clients.reserve(static_cast<std::size_t>(coreset.total));
  std::map<int, std::pair<double, std::int64_t>> clean_sums;

  std::uint64_t client = 0;
  for (const CoresetEntry& e : coreset.entries) {
    const double mean = instance.MeanReward(e.action);
    for (std::int64_t i = 0; i < e.count; ++i, ++client) {
      Stream cs = rng.Derive({client});
      Observation obs;
      obs.action_index = e.action;
      obs.corrupted = adversary.active() && cs.NextOpenUnit() < adversary.alpha;
      obs.raw_reward = mean + instance.DrawNoise(cs);
      auto& acc = clean_sums[e.action];
      acc.first += obs.raw_reward;
      acc.second += 1;
      out.push_back(obs);
      clients.push_back(cs);
    }
  }

  const int worst = EmpiricallyWorst(clean_sums);
  for (std::size_t j = 0; j < out.size(); ++j) {
    Observation& obs = out[j];
    const double replaced =
        obs.corrupted
            ? CorruptedValue(adversary, obs.action_index, obs.raw_reward, worst)
            : obs.raw_reward;
    if (adversary.stage == CorruptStage::kPrePrivacy) {
      obs.reported_reward = PrivatizeM1(replaced, privacy, clients[j]);
    } else {
      const double released = PrivatizeM1(obs.raw_reward, privacy, clients[j]);
      obs.reported_reward = obs.corrupted ? replaced : released;
    }
    obs.corrupted_draws = obs.corrupted ? 1 : 0;
  }
  return out;
}

std::vector<Observation> ObserveBatchM2(const BanditInstance& instance,
                                        const Coreset& coreset,
                                        const AdversaryConfig& adversary,
                                        const PrivacyParams& privacy,
                                        const Stream& rng) {
  CheckCoreset(instance, coreset, ClientModel::kM2);
  const bool raw_target = adversary.m2_target == AggregateCorruption::kRawDraws &&
                          adversary.stage == CorruptStage::kPrePrivacy;
  const bool clip_draws = privacy.enabled && privacy.clip.has_value();

  struct ClientState {
    Stream stream;
    std::vector<double> draws;
    std::vector<bool> mask;
  };
  std::vector<ClientState> clients;
  clients.reserve(coreset.entries.size());
  std::map<int, std::pair<double, std::int64_t>> clean_sums;

  for (std::size_t c = 0; c < coreset.entries.size(); ++c) {
    const CoresetEntry& e = coreset.entries[c];
    ClientState st{rng.Derive({static_cast<std::uint64_t>(c)}), {}, {}};
    st.draws.resize(static_cast<std::size_t>(e.count));
    st.mask.resize(static_cast<std::size_t>(e.count));
    const double mean = instance.MeanReward(e.action);
    auto& acc = clean_sums[e.action];
    for (std::int64_t i = 0; i < e.count; ++i) {
      const double u = st.stream.NextOpenUnit();
      st.mask[i] = raw_target && adversary.active() && u < adversary.alpha;
      st.draws[i] = mean + instance.DrawNoise(st.stream);
      acc.first += st.draws[i];
      acc.second += 1;
    }
    clients.push_back(std::move(st));
  }

  const int worst = EmpiricallyWorst(clean_sums);
  std::vector<Observation> out;
  out.reserve(clients.size());
  for (std::size_t c = 0; c < clients.size(); ++c) {
    const CoresetEntry& e = coreset.entries[c];
    ClientState& st = clients[c];
    Observation obs;
    obs.action_index = e.action;
    obs.plays = e.count;

    // Averages are accumulated as deviations from the mean reward so that a
    // noiseless clean batch reports the mean exactly.
    const double mean = instance.MeanReward(e.action);
    double clean_dev = 0.0;
    double sent_dev = 0.0;
    for (std::size_t i = 0; i < st.draws.size(); ++i) {
      clean_dev += st.draws[i] - mean;
      double v = st.mask[i]
                     ? CorruptedValue(adversary, e.action, st.draws[i], worst)
                     : st.draws[i];
      if (clip_draws) v = std::clamp(v, -*privacy.clip, *privacy.clip);
      sent_dev += v - mean;
      if (st.mask[i]) ++obs.corrupted_draws;
    }
    const double n_a = static_cast<double>(e.count);
    obs.raw_reward = mean + clean_dev / n_a;

    // Report-level corruption: one coin per client.
    const bool report_hit = !raw_target && adversary.active() &&
                            st.stream.NextOpenUnit() < adversary.alpha;
    double aggregate = mean + sent_dev / n_a;
    if (report_hit && adversary.stage == CorruptStage::kPrePrivacy) {
      aggregate = CorruptedValue(adversary, e.action, aggregate, worst);
    }
    double released = PrivatizeM2(aggregate, e.count, privacy, st.stream);
    if (report_hit && adversary.stage == CorruptStage::kPostPrivacy) {
      released = CorruptedValue(adversary, e.action, released, worst);
    }
    obs.corrupted = obs.corrupted_draws > 0 || report_hit;
    obs.reported_reward = released;
    out.push_back(obs);
  }
  return out;
}

double InstantaneousRegret(const BanditInstance& instance, int action_index) {
  if (action_index < 0 || action_index >= instance.actions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "action index out of range");
  }
  const double best = instance.MeanReward(instance.OptimalAction());
  return std::max(0.0, best - instance.MeanReward(action_index));
}

class Environment::Channel final : public LearnerChannel {
 public:
  explicit Channel(Environment* env) : env_(env) {}

  const ActionSet& actions() const override { return env_->instance_.actions; }
  ClientModel model() const override { return env_->model_; }
  std::vector<Report> PlayBatch(const Coreset& coreset, int round) override {
    return env_->Play(coreset, round);
  }
  void Commit(int action_index, std::int64_t count) override {
    env_->Commit(action_index, count);
  }

  void Rebind(Environment* env) { env_ = env; }

 private:
  Environment* env_;
};

Environment::Environment(BanditInstance instance, AdversaryConfig adversary,
                         PrivacyParams privacy, ClientModel model, Stream stream)
    : instance_(std::move(instance)),
      adversary_(adversary),
      privacy_(privacy),
      model_(model),
      stream_(stream),
      channel_(std::make_unique<Channel>(this)) {
  instance_.Validate();
  adversary_.Validate();
  privacy_.Validate();
}

Environment::~Environment() = default;

Environment::Environment(Environment&& other) noexcept
    : instance_(std::move(other.instance_)),
      adversary_(other.adversary_),
      privacy_(other.privacy_),
      model_(other.model_),
      stream_(other.stream_),
      channel_(std::move(other.channel_)),
      play_log_(std::move(other.play_log_)),
      total_plays_(other.total_plays_),
      batches_(std::move(other.batches_)) {
  channel_->Rebind(this);
}

Environment& Environment::operator=(Environment&& other) noexcept {
  if (this != &other) {
    instance_ = std::move(other.instance_);
    adversary_ = other.adversary_;
    privacy_ = other.privacy_;
    model_ = other.model_;
    stream_ = other.stream_;
    channel_ = std::move(other.channel_);
    play_log_ = std::move(other.play_log_);
    total_plays_ = other.total_plays_;
    batches_ = std::move(other.batches_);
    channel_->Rebind(this);
  }
  return *this;
}

LearnerChannel& Environment::learner() { return *channel_; }

std::vector<Report> Environment::Play(const Coreset& coreset, int round) {
  const Stream round_stream = stream_.Derive({static_cast<std::uint64_t>(round)});
  std::vector<Observation> batch =
      model_ == ClientModel::kM1
          ? ObserveBatchM1(instance_, coreset, adversary_, privacy_, round_stream)
          : ObserveBatchM2(instance_, coreset, adversary_, privacy_, round_stream);
  std::vector<Report> reports;
  reports.reserve(batch.size());
  for (const Observation& obs : batch) {
    reports.push_back({obs.action_index, obs.reported_reward, obs.plays});
  }
  for (const CoresetEntry& e : coreset.entries) {
    play_log_.push_back(e);
    total_plays_ += e.count;
  }
  batches_.push_back(std::move(batch));
  return reports;
}

void Environment::Commit(int action_index, std::int64_t count) {
  if (action_index < 0 || action_index >= instance_.actions.size()) {
    throw Error(ErrorCode::kInvalidArgument, "committed action out of range");
  }
  if (count <= 0) return;
  play_log_.push_back({action_index, count});
  total_plays_ += count;
}

}  // namespace rpbandit
