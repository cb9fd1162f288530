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

#include "estime/error.h"

namespace estime {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInputSize: return "input-size";
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kEmptyText: return "empty-text";
    case ErrorCode::kDegenerateInput: return "degenerate-input";
    case ErrorCode::kIncompleteGrid: return "incomplete-grid";
    case ErrorCode::kInsufficientPositions: return "insufficient-positions";
    case ErrorCode::kNoCandidate: return "no-candidate";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kMissingIds: return "missing-ids";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kBackend: return "backend";
  }
  return "unknown";
}

}  // namespace estime
