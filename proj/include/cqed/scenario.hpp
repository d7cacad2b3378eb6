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

// Configuration-driven benchmark runs: JSON scenario files in, CSV series,
// spectra.json and manifest.json out.

#ifndef CQED_SCENARIO_HPP
#define CQED_SCENARIO_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cqed/bose_hubbard.hpp"
#include "cqed/cooling.hpp"
#include "cqed/error.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/observables.hpp"

namespace cqed {

enum class Scenario { kCooling, kBoseHubbard, kSpectrum, kSweep };
enum class Tier { kFull, kAtomOnly, kAdiabatic, kDiabatic, kRateEquation, kGaussianAnsatz };

std::string_view to_string(Scenario s);
std::string_view to_string(Tier t);

struct ScenarioConfig {
  Scenario scenario = Scenario::kCooling;
  /// Model family for spectrum scenarios ("cooling" or "bosehubbard").
  Scenario model = Scenario::kCooling;
  std::vector<Tier> tiers;
  CoolingParams cooling;
  double initial_temperature = 20.0;  ///< units of the recoil energy
  BHParams bh;
  std::optional<double> t_final;
  std::size_t n_samples = 101;
  EvolveOptions evolve;
  std::size_t eigenvalue_count = 10;
  bool convergence_check = true;
  /// Cutoff-convergence bound on the slowest eigenvalues (units of J or omega_R).
  double eigenvalue_tol = 0.05;
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::optional<std::string> output_dir;
  nlohmann::ordered_json source;  ///< the parsed document, echoed in the manifest
};

/// Strict parse: unknown keys, wrong types and tiers that do not belong to
/// the scenario throw ConfigError naming the JSON path.
ScenarioConfig parse_config(const nlohmann::ordered_json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Regime checks that need no time evolution (weak-coupling bound, cooling
/// regime, superoperator size). Throws Error on the first violation.
void check_regime(const ScenarioConfig& config);

/// Default end time: 5/gamma_c for cooling, 2/Gamma for Bose-Hubbard.
double resolved_t_final(const ScenarioConfig& config);

struct RunOutput {
  std::map<std::string, ObservableSeries> series;  ///< key: "<tier>/<name>"
  std::optional<nlohmann::ordered_json> spectra;
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();
  nlohmann::ordered_json validity = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;
};

/// Runs every tier (one worker per tier) and collects the results.
RunOutput run_scenario(const ScenarioConfig& config);

/// Writes CSVs, spectra.json and manifest.json (with FNV-1a checksums).
void write_run(const ScenarioConfig& config, const RunOutput& output,
               const std::filesystem::path& dir, double wall_time_seconds);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a64(std::string_view bytes);

/// time,value[,value_imag] with %.17g.
std::string format_csv(const ObservableSeries& series);
ObservableSeries read_csv(const std::filesystem::path& path);

struct CompareReport {
  std::string series_a;
  std::string series_b;
  double max_relative_deviation = 0.0;
  double at_time = 0.0;
  std::size_t points = 0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Max relative deviation over the overlap of two series, interpolating
/// linearly onto the coarser grid. Missing series throw ConfigError.
CompareReport compare_runs(const std::filesystem::path& dir_a,
                           const std::filesystem::path& dir_b, const std::string& series_a,
                           const std::string& series_b, double tolerance);
CompareReport compare_series(const ObservableSeries& a, const ObservableSeries& b,
                             double tolerance);

/// 2 for configuration errors, 3 for regime violations, 4 otherwise.
int exit_code_for(const Error& e);
/// {"error": kind, "message": ..., "field": path-if-any}
nlohmann::ordered_json error_record(const Error& e);

}  // namespace cqed

#endif  // CQED_SCENARIO_HPP
