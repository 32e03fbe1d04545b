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

#ifndef RPBANDIT_RNG_HPP_
#define RPBANDIT_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace rpbandit {

// Counter-free SplitMix64 stream. Satisfies UniformRandomBitGenerator so it
// plugs into <random> distributions. Streams are cheap to construct, which
// lets every (round, client) pair own an independent stream derived from the
// master seed; results then do not depend on execution order.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in the open interval (0, 1).
  double NextOpenUnit();

  // Child stream keyed by `tags`; does not advance this stream.
  Stream Derive(std::initializer_list<std::uint64_t> tags) const;

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Order-sensitive 64-bit mix of a seed and tags.
std::uint64_t MixSeed(std::uint64_t seed,
                      std::initializer_list<std::uint64_t> tags);

// Stable 64-bit hash of a short string tag (FNV-1a), used for variant names.
std::uint64_t TagHash(const char* text);

}  // namespace rpbandit

#endif  // RPBANDIT_RNG_HPP_
