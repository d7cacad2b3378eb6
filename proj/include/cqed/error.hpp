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

#ifndef CQED_ERROR_HPP
#define CQED_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqed {

/// Failure categories. The CLI maps these onto exit codes (config -> 2,
/// regime -> 3, everything numerical -> 4).
enum class ErrorKind {
  kInvalidDimension,
  kShape,
  kConfig,
  kRegime,
  kNoCooling,
  kNonNormalizable,
  kNumerical,
  kStiffness,
  kIntegrationAccuracy,
  kSize,
  kNoSteadyState,
  kUndefinedKurtosis,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Schema violations carry the JSON path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field_path, const std::string& message)
      : Error(ErrorKind::kConfig, message), field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

/// Raised when the adaptive integrator cannot make progress.
class StiffnessError : public Error {
 public:
  StiffnessError(double time_reached, const std::string& message)
      : Error(ErrorKind::kStiffness, message), time_reached_(time_reached) {}

  double time_reached() const noexcept { return time_reached_; }

 private:
  double time_reached_;
};

}  // namespace cqed

#endif  // CQED_ERROR_HPP
