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

#include "rpbandit/rng.hpp"

#include "rpbandit/errors.hpp"

namespace rpbandit {

namespace {

std::uint64_t Finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFailsToConverge:
      return "FAILS_TO_CONVERGE";
    case ErrorCode::kInvalidNu:
      return "INVALID_NU";
    case ErrorCode::kOutOfSpan:
      return "OUT_OF_SPAN";
    case ErrorCode::kTooManyRemoved:
      return "TOO_MANY_REMOVED";
    case ErrorCode::kSingularGram:
      return "SINGULAR_GRAM";
    case ErrorCode::kInvalidArgument:
      return "INVALID_ARGUMENT";
    case ErrorCode::kConfigInvalid:
      return "CONFIG_INVALID";
    case ErrorCode::kCheckpointOutOfRange:
      return "CHECKPOINT_OUT_OF_RANGE";
    case ErrorCode::kIo:
      return "IO_ERROR";
  }
  return "UNKNOWN";
}

double Stream::NextOpenUnit() {
  // 53 random bits shifted by half an ulp: never 0, never 1.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

Stream Stream::Derive(std::initializer_list<std::uint64_t> tags) const {
  return Stream(MixSeed(state_, tags));
}

std::uint64_t MixSeed(std::uint64_t seed,
                      std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = Finalize(seed + 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t tag : tags) {
    h = Finalize(h ^ (Finalize(tag + 0x632be59bd9b4e019ULL) +
                      0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

std::uint64_t TagHash(const char* text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = text; *p != '\0'; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rpbandit
