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

#ifndef RPBANDIT_ENV_HPP_
#define RPBANDIT_ENV_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rpbandit/design.hpp"
#include "rpbandit/linalg.hpp"
#include "rpbandit/privacy.hpp"
#include "rpbandit/rng.hpp"

namespace rpbandit {

enum class NoiseKind { kGaussian, kUniform, kZero };

std::string ToString(NoiseKind kind);
NoiseKind ParseNoiseKind(const std::string& text);

// Hidden parameter, action set and clean-reward noise. Gaussian has unit
// variance; uniform is U[-1, 1]. Both are 1-sub-Gaussian.
struct BanditInstance {
  Vector theta_star;
  ActionSet actions;
  NoiseKind noise = NoiseKind::kGaussian;

  void Validate() const;
  double MeanReward(int action) const;
  int OptimalAction() const;  // lowest index among maximizers
  double DrawNoise(Stream& rng) const;
};

// Random instance: K unit-norm actions and theta* uniform on the unit sphere
// of radius `theta_norm`.
BanditInstance RandomInstance(int dim, int num_actions, double theta_norm,
                              NoiseKind noise, std::uint64_t seed);

enum class Strategy {
  kNone,
  kConstant,       // replace with c
  kLargePositive,  // replace with +|c|
  kSignFlip,       // replace with -r, clamped to [-c, c]
  kAntiOptimal,    // +c on the batch's empirically worst arm, -c elsewhere
};

std::string ToString(Strategy strategy);
Strategy ParseStrategy(const std::string& text);

enum class CorruptStage { kPrePrivacy, kPostPrivacy };

// Under M2, whether corruption hits the raw draws (each with prob. alpha)
// or the single aggregated report (with prob. alpha).
enum class AggregateCorruption { kRawDraws, kAggregateReport };

inline constexpr double kMaxCorruptionMagnitude = 100.0;

struct AdversaryConfig {
  double alpha = 0.0;
  Strategy strategy = Strategy::kNone;
  double magnitude = 0.0;
  CorruptStage stage = CorruptStage::kPrePrivacy;
  AggregateCorruption m2_target = AggregateCorruption::kRawDraws;

  void Validate() const;
  bool active() const { return strategy != Strategy::kNone && alpha > 0.0; }
};

// Oracle-level record of one report. `corrupted` and `raw_reward` are never
// shown to the learner.
struct Observation {
  int action_index = 0;
  double raw_reward = 0.0;
  bool corrupted = false;
  double reported_reward = 0.0;
  // Plays behind this report (1 under M1, n_a under M2).
  std::int64_t plays = 1;
  // Corrupted raw draws behind an M2 report.
  std::int64_t corrupted_draws = 0;
};

// Action indices of a coreset refer to positions in `instance.actions`.
// `rng` is the round stream; client j draws from rng.Derive({j}).
std::vector<Observation> ObserveBatchM1(const BanditInstance& instance,
                                        const Coreset& coreset,
                                        const AdversaryConfig& adversary,
                                        const PrivacyParams& privacy,
                                        const Stream& rng);

std::vector<Observation> ObserveBatchM2(const BanditInstance& instance,
                                        const Coreset& coreset,
                                        const AdversaryConfig& adversary,
                                        const PrivacyParams& privacy,
                                        const Stream& rng);

double InstantaneousRegret(const BanditInstance& instance, int action_index);

// What the learner sees: an action and a (possibly corrupted, privatized)
// reward, plus how many plays the report aggregates.
struct Report {
  int action_index = 0;
  double reward = 0.0;
  std::int64_t plays = 1;
};

// Learner-facing capability. Exposes the action set and a way to play
// batches; nothing about theta* or corruption.
class LearnerChannel {
 public:
  virtual ~LearnerChannel() = default;
  virtual const ActionSet& actions() const = 0;
  virtual ClientModel model() const = 0;
  // Plays a coreset as batch `round`. Under M2 one report per entry.
  virtual std::vector<Report> PlayBatch(const Coreset& coreset, int round) = 0;
  // Commits `count` plays of one action (exploitation); no feedback.
  virtual void Commit(int action_index, std::int64_t count) = 0;
};

// Simulated environment. Owns the instance and records every play for the
// oracle; hands the learner only a LearnerChannel.
class Environment {
 public:
  Environment(BanditInstance instance, AdversaryConfig adversary,
              PrivacyParams privacy, ClientModel model, Stream stream);
  ~Environment();
  Environment(Environment&&) noexcept;
  Environment& operator=(Environment&&) noexcept;

  LearnerChannel& learner();

  // Oracle interface.
  const BanditInstance& instance() const { return instance_; }
  const AdversaryConfig& adversary() const { return adversary_; }
  const PrivacyParams& privacy() const { return privacy_; }
  ClientModel model() const { return model_; }
  // Run-length play log: (action, count) in play order.
  const std::vector<CoresetEntry>& play_log() const { return play_log_; }
  std::int64_t total_plays() const { return total_plays_; }
  // Observations of each batch, by round.
  const std::vector<std::vector<Observation>>& batches() const {
    return batches_;
  }

 private:
  class Channel;

  std::vector<Report> Play(const Coreset& coreset, int round);
  void Commit(int action_index, std::int64_t count);

  BanditInstance instance_;
  AdversaryConfig adversary_;
  PrivacyParams privacy_;
  ClientModel model_;
  Stream stream_;
  std::unique_ptr<Channel> channel_;
  std::vector<CoresetEntry> play_log_;
  std::int64_t total_plays_ = 0;
  std::vector<std::vector<Observation>> batches_;
};

}  // namespace rpbandit

#endif  // RPBANDIT_ENV_HPP_
