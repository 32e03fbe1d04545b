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

#ifndef RPBANDIT_ERRORS_HPP_
#define RPBANDIT_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpbandit {

enum class ErrorCode {
  kFailsToConverge,
  kInvalidNu,
  kOutOfSpan,
  kTooManyRemoved,
  kSingularGram,
  kInvalidArgument,
  kConfigInvalid,
  kCheckpointOutOfRange,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures surface as this exception; `code()` identifies the
// condition so callers (the policy fallback, the harness error log) can
// branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rpbandit

#endif  // RPBANDIT_ERRORS_HPP_
