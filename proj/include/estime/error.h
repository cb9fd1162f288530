// Copyright 2026 The estime Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ESTIME_ERROR_H_
#define ESTIME_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace estime {

enum class ErrorCode {
  kInvalidArgument,
  kInputSize,
  kConfiguration,
  kEmptyText,
  kDegenerateInput,
  kIncompleteGrid,
  kInsufficientPositions,
  kNoCandidate,
  kParse,
  kSchema,
  kMissingIds,
  kIo,
  kBackend,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported as estime::Error. The code identifies the
// failure class; the message carries the context (line numbers, ids, passes).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace estime

#endif  // ESTIME_ERROR_H_
