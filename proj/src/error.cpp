// Copyright 2026 The Vinemark Authors.
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
#include "vinemark/error.hpp"

namespace vinemark {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter: return "invalid-parameter";
    case ErrorCode::kEmptyTruth: return "empty-truth";
    case ErrorCode::kEmptyComponent: return "empty-component";
    case ErrorCode::kMultiBudTruth: return "multi-bud-truth";
    case ErrorCode::kWindowTooLarge: return "window-too-large";
    case ErrorCode::kInconsistentInput: return "inconsistent-input";
    case ErrorCode::kInconsistentConfig: return "inconsistent-config";
    case ErrorCode::kUndefinedCount: return "undefined-count";
    case ErrorCode::kOracleSize: return "oracle-size";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

}  // namespace vinemark
