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

// cqedsim: run, validate and compare benchmark scenarios.
//
//   cqedsim simulate <config.json> [--out DIR]
//   cqedsim compare <dirA> <dirB> --series NAME [--series-b NAME] --tol X
//   cqedsim validate <config.json>
//
// Exit codes: 0 success, 1 comparison outside tolerance, 2 configuration
// error or missing series, 3 regime violation, 4 numerical failure.

#include <chrono>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cqed/scenario.hpp"

namespace {

int fail(const cqed::Error& e) {
  std::cerr << cqed::error_record(e).dump() << "\n";
  return cqed::exit_code_for(e);
}

int simulate(const std::string& config_path, const std::string& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  const cqed::ScenarioConfig config = cqed::load_config(config_path);
  const cqed::RunOutput output = cqed::run_scenario(config);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::filesystem::path dir =
      !out_dir.empty() ? out_dir : config.output_dir.value_or("out");
  cqed::write_run(config, output, dir, wall);
  for (const auto& w : output.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << (dir / "manifest.json").string() << "\n";
  return 0;
}

int compare(const std::string& a, const std::string& b, const std::string& series,
            const std::string& series_b, double tol) {
  const auto r = cqed::compare_runs(a, b, series, series_b.empty() ? series : series_b, tol);
  nlohmann::ordered_json doc = {{"series_a", a + "/" + series},
                                {"series_b", b + "/" + (series_b.empty() ? series : series_b)},
                                {"max_relative_deviation", r.max_relative_deviation},
                                {"at_time", r.at_time},
                                {"points", r.points},
                                {"tolerance", r.tolerance},
                                {"pass", r.pass}};
  std::cout << doc.dump(2) << "\n";
  return r.pass ? 0 : 1;
}

int validate(const std::string& config_path) {
  const cqed::ScenarioConfig config = cqed::load_config(config_path);
  cqed::check_regime(config);
  nlohmann::ordered_json doc = {{"valid", true}, {"scenario", cqed::to_string(config.scenario)}};
  if (config.scenario == cqed::Scenario::kCooling ||
      config.scenario == cqed::Scenario::kBoseHubbard) {
    doc["t_final"] = cqed::resolved_t_final(config);
  }
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-QED master-equation benchmarks"};
  app.set_version_flag("--version", std::string(CQED_VERSION));
  app.require_subcommand(1);

  std::string config_path, out_dir, dir_a, dir_b, series, series_b;
  double tol = 0.05;

  auto* sim = app.add_subcommand("simulate", "Run a scenario and write its outputs");
  sim->add_option("config", config_path, "Scenario JSON file")->required();
  sim->add_option("--out", out_dir, "Output directory (overrides output_dir)");

  auto* cmp = app.add_subcommand("compare", "Compare one series between two run directories");
  cmp->add_option("dir_a", dir_a, "First run (tier) directory")->required();
  cmp->add_option("dir_b", dir_b, "Second run (tier) directory")->required();
  cmp->add_option("--series", series, "Series name, e.g. E_kin")->required();
  cmp->add_option("--series-b", series_b, "Series name in the second directory, if different");
  cmp->add_option("--tol", tol, "Tolerance on the max relative deviation")->required();

  auto* val = app.add_subcommand("validate", "Schema and regime check only");
  val->add_option("config", config_path, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) return simulate(config_path, out_dir);
    if (*cmp) return compare(dir_a, dir_b, series, series_b, tol);
    return validate(config_path);
  } catch (const cqed::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::ordered_json{{"error", "internal"}, {"message", e.what()}, {"exit_code", 4}}.dump()
              << "\n";
    return 4;
  }
}
