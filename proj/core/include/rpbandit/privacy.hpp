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

#ifndef RPBANDIT_PRIVACY_HPP_
#define RPBANDIT_PRIVACY_HPP_

#include <cstdint>
#include <optional>

#include "rpbandit/rng.hpp"

namespace rpbandit {

// Local privacy settings. When disabled every mechanism is the identity.
// Only pure epsilon-LDP is provided, so there is no delta parameter.
struct PrivacyParams {
  double epsilon = 1.0;
  bool enabled = false;
  // Optional raw-reward clip R: rewards are clipped to [-R, R] and the
  // sensitivity becomes 2R instead of 2.
  std::optional<double> clip;

  void Validate() const;
  double Sensitivity() const { return clip ? 2.0 * *clip : 2.0; }
};

// Inverse CDF of Laplace(0, scale) at u in (0, 1).
double LaplaceQuantile(double u, double scale);

// Laplace(0, scale) CDF.
double LaplaceCdf(double x, double scale);

double SampleLaplace(double scale, Stream& rng);

// Per-reward client (model M1): r + Lap(2/eps).
double PrivatizeM1(double reward, const PrivacyParams& params, Stream& rng);

// Per-action client (model M2) reporting the mean of `n_a` rewards:
// mean + Lap(2/(n_a eps)).
double PrivatizeM2(double mean_reward, std::int64_t n_a,
                   const PrivacyParams& params, Stream& rng);

}  // namespace rpbandit

#endif  // RPBANDIT_PRIVACY_HPP_
