// Copyright 2026 The cqed Authors
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

#include "cqed/error.hpp"

namespace cqed {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidDimension: return "invalid-dimension";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kRegime: return "regime";
    case ErrorKind::kNoCooling: return "no-cooling";
    case ErrorKind::kNonNormalizable: return "non-normalizable";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kStiffness: return "stiffness";
    case ErrorKind::kIntegrationAccuracy: return "integration-accuracy";
    case ErrorKind::kSize: return "size";
    case ErrorKind::kNoSteadyState: return "no-steady-state";
    case ErrorKind::kUndefinedKurtosis: return "undefined-kurtosis";
  }
  return "unknown";
}

}  // namespace cqed
