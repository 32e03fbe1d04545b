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

#include "rpbandit/privacy.hpp"

#include <algorithm>
#include <cmath>

#include "rpbandit/errors.hpp"

namespace rpbandit {

void PrivacyParams::Validate() const {
  if (enabled && !(epsilon > 0.0 && std::isfinite(epsilon))) {
    throw Error(ErrorCode::kInvalidArgument, "privacy epsilon must be positive");
  }
  if (clip && !(*clip > 0.0 && std::isfinite(*clip))) {
    throw Error(ErrorCode::kInvalidArgument, "privacy clip must be positive");
  }
}

double LaplaceQuantile(double u, double scale) {
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

double LaplaceCdf(double x, double scale) {
  if (x < 0.0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

double SampleLaplace(double scale, Stream& rng) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Laplace scale must be positive");
  }
  return LaplaceQuantile(rng.NextOpenUnit(), scale);
}

namespace {

double Clip(double value, const PrivacyParams& params) {
  return params.clip ? std::clamp(value, -*params.clip, *params.clip) : value;
}

}  // namespace

double PrivatizeM1(double reward, const PrivacyParams& params, Stream& rng) {
  if (!params.enabled) return reward;
  return Clip(reward, params) +
         SampleLaplace(params.Sensitivity() / params.epsilon, rng);
}

double PrivatizeM2(double mean_reward, std::int64_t n_a,
                   const PrivacyParams& params, Stream& rng) {
  if (n_a < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_a must be at least 1");
  }
  if (!params.enabled) return mean_reward;
  const double scale =
      params.Sensitivity() / (static_cast<double>(n_a) * params.epsilon);
  return Clip(mean_reward, params) + SampleLaplace(scale, rng);
}

}  // namespace rpbandit
