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

#include "cqed/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include "cqed/spectral.hpp"

#ifndef CQED_VERSION
#define CQED_VERSION "unknown"
#endif

namespace cqed {

using json = nlohmann::ordered_json;

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::kCooling: return "cooling";
    case Scenario::kBoseHubbard: return "bosehubbard";
    case Scenario::kSpectrum: return "spectrum";
    case Scenario::kSweep: return "sweep";
  }
  return "?";
}

std::string_view to_string(Tier t) {
  switch (t) {
    case Tier::kFull: return "full";
    case Tier::kAtomOnly: return "atom_only";
    case Tier::kAdiabatic: return "adiabatic";
    case Tier::kDiabatic: return "diabatic";
    case Tier::kRateEquation: return "rate_equation";
    case Tier::kGaussianAnsatz: return "gaussian_ansatz";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

// Walks one JSON object, remembering which keys were read so leftovers can
// be rejected with their full path.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(root(), "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "expected a finite number");
    return x;
  }

  std::optional<long long> integer(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v->get<long long>();
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ConfigError(at(key), "expected a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v->get<bool>();
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
    }
  }

 private:
  std::string root() const { return path_.empty() ? "$" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::size_t positive_size(std::optional<long long> v, const std::string& path, std::size_t dflt,
                          long long min = 1) {
  if (!v) return dflt;
  if (*v < min) throw ConfigError(path, "must be at least " + std::to_string(min));
  return static_cast<std::size_t>(*v);
}

Scenario parse_model(const std::string& s, const std::string& path) {
  if (s == "cooling") return Scenario::kCooling;
  if (s == "bosehubbard") return Scenario::kBoseHubbard;
  throw ConfigError(path, "expected \"cooling\" or \"bosehubbard\"");
}

Tier parse_tier(const std::string& s, const std::string& path) {
  for (Tier t : {Tier::kFull, Tier::kAtomOnly, Tier::kAdiabatic, Tier::kDiabatic,
                 Tier::kRateEquation, Tier::kGaussianAnsatz}) {
    if (to_string(t) == s) return t;
  }
  throw ConfigError(path, "unknown tier \"" + s + "\"");
}

bool tier_allowed(Scenario model, Scenario scenario, Tier t) {
  if (model == Scenario::kCooling) {
    if (scenario == Scenario::kSpectrum) return t == Tier::kFull || t == Tier::kAtomOnly;
    if (scenario == Scenario::kSweep) return t == Tier::kRateEquation || t == Tier::kGaussianAnsatz;
    return t == Tier::kFull || t == Tier::kAtomOnly || t == Tier::kRateEquation ||
           t == Tier::kGaussianAnsatz;
  }
  return t == Tier::kFull || t == Tier::kAdiabatic || t == Tier::kDiabatic;
}

const std::vector<std::string> kCoolingKeys = {
    "eta_per_omega_R",          "delta_per_omega_R", "kappa_per_omega_R",
    "dispersive_shift_per_omega_R", "n_max",         "photon_cutoff",
    "temperature_per_omega_R"};
const std::vector<std::string> kBoseHubbardKeys = {"u_per_J",   "eta_per_J", "delta_per_J",
                                                   "kappa_per_J", "L",       "N",
                                                   "Z",         "Y",         "photon_cutoff"};

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

int small_int(double x, const std::string& path, int min) {
  if (x != std::floor(x) || x < min || x > 1e6) {
    throw ConfigError(path, "expected an integer >= " + std::to_string(min));
  }
  return static_cast<int>(x);
}

// Sets one unit-suffixed parameter; shared by the params block and sweeps.
void set_param(ScenarioConfig& c, const std::string& key, const json& v, const std::string& path) {
  if (key == "Z" || key == "Y") {
    (key == "Z" ? c.bh.Z : c.bh.Y) = number_list(v, path);
    return;
  }
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "expected a finite number");
  if (c.model == Scenario::kCooling) {
    if (key == "eta_per_omega_R") c.cooling.eta = x;
    else if (key == "delta_per_omega_R") c.cooling.delta = x;
    else if (key == "kappa_per_omega_R") c.cooling.kappa = x;
    else if (key == "dispersive_shift_per_omega_R") c.cooling.dispersive_shift = x;
    else if (key == "n_max") c.cooling.ladder = MomentumLadder(small_int(x, path, 1));
    else if (key == "photon_cutoff") c.cooling.photon_cutoff = static_cast<std::size_t>(small_int(x, path, 2));
    else if (key == "temperature_per_omega_R") {
      if (x <= 0.0) throw ConfigError(path, "temperature must be positive");
      c.initial_temperature = x;
    } else {
      throw ConfigError(path, "unknown key");
    }
  } else {
    if (key == "u_per_J") c.bh.u = x;
    else if (key == "eta_per_J") c.bh.eta = x;
    else if (key == "delta_per_J") c.bh.delta = x;
    else if (key == "kappa_per_J") c.bh.kappa = x;
    else if (key == "L") c.bh.L = small_int(x, path, 2);
    else if (key == "N") c.bh.N = small_int(x, path, 0);
    else if (key == "photon_cutoff") c.bh.photon_cutoff = static_cast<std::size_t>(small_int(x, path, 2));
    else throw ConfigError(path, "unknown key");
  }
}

void validate_params(const ScenarioConfig& c) {
  try {
    if (c.model == Scenario::kCooling) c.cooling.validate();
    else c.bh.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("params." + e.field_path(), e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfig) throw ConfigError("params", e.what());
    throw;
  }
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig c;
  c.source = doc;
  ObjectReader top(doc, "");

  const auto scenario = top.string("scenario");
  if (!scenario) throw ConfigError("scenario", "missing required key");
  if (*scenario == "cooling") c.scenario = Scenario::kCooling;
  else if (*scenario == "bosehubbard") c.scenario = Scenario::kBoseHubbard;
  else if (*scenario == "spectrum") c.scenario = Scenario::kSpectrum;
  else if (*scenario == "sweep") c.scenario = Scenario::kSweep;
  else throw ConfigError("scenario", "expected cooling, bosehubbard, spectrum or sweep");

  const auto model = top.string("model");
  if (c.scenario == Scenario::kSpectrum || c.scenario == Scenario::kSweep) {
    if (!model) throw ConfigError("model", "required for spectrum and sweep scenarios");
    c.model = parse_model(*model, "model");
  } else {
    if (model) throw ConfigError("model", "only valid for spectrum and sweep scenarios");
    c.model = c.scenario;
  }

  const json* tiers = top.get("tiers");
  if (!tiers) throw ConfigError("tiers", "missing required key");
  if (!tiers->is_array() || tiers->empty()) throw ConfigError("tiers", "expected a non-empty array");
  for (std::size_t i = 0; i < tiers->size(); ++i) {
    const std::string path = "tiers[" + std::to_string(i) + "]";
    if (!(*tiers)[i].is_string()) throw ConfigError(path, "expected a string");
    const Tier t = parse_tier((*tiers)[i].get<std::string>(), path);
    if (!tier_allowed(c.model, c.scenario, t)) {
      throw ConfigError(path, "tier \"" + std::string(to_string(t)) + "\" is not valid for a " +
                                  std::string(to_string(c.scenario)) + " scenario");
    }
    if (std::find(c.tiers.begin(), c.tiers.end(), t) != c.tiers.end()) {
      throw ConfigError(path, "duplicate tier");
    }
    c.tiers.push_back(t);
  }

  if (const json* params = top.get("params")) {
    if (!params->is_object()) throw ConfigError("params", "expected an object");
    const auto& allowed = c.model == Scenario::kCooling ? kCoolingKeys : kBoseHubbardKeys;
    for (auto it = params->begin(); it != params->end(); ++it) {
      const std::string path = "params." + it.key();
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
        throw ConfigError(path, "unknown key");
      }
      set_param(c, it.key(), it.value(), path);
    }
  }
  validate_params(c);

  const std::string t_key =
      c.model == Scenario::kCooling ? "t_final_times_omega_R" : "t_final_times_J";
  const std::string wrong_t_key =
      c.model == Scenario::kCooling ? "t_final_times_J" : "t_final_times_omega_R";
  if (top.has(wrong_t_key)) {
    throw ConfigError(wrong_t_key, "wrong time unit for this model; use " + t_key);
  }
  c.t_final = top.number(t_key);
  if (c.t_final && *c.t_final <= 0.0) throw ConfigError(t_key, "must be positive");
  c.n_samples = positive_size(top.integer("n_samples"), "n_samples", 101, 2);

  if (const json* tol = top.get("tolerances")) {
    ObjectReader r(*tol, "tolerances");
    auto positive = [&r](const std::string& key, double& slot) {
      if (auto v = r.number(key)) {
        if (*v <= 0.0) throw ConfigError(r.at(key), "must be positive");
        slot = *v;
      }
    };
    positive("rel_tol", c.evolve.rel_tol);
    positive("abs_tol", c.evolve.abs_tol);
    positive("max_trace_drift", c.evolve.max_trace_drift);
    positive("eigenvalue_tol", c.eigenvalue_tol);
    r.reject_unknown();
  }
  if (auto integ = top.string("integrator")) {
    if (*integ == "dormand_prince45") c.evolve.method = Integrator::kDormandPrince45;
    else if (*integ == "exponential_rk4") c.evolve.method = Integrator::kExponentialRk4;
    else throw ConfigError("integrator", "expected dormand_prince45 or exponential_rk4");
  }
  if (!top.has("integrator")) c.evolve.method = Integrator::kExponentialRk4;
  c.evolve.store_states = false;
  if (auto out = top.string("output_dir")) c.output_dir = *out;

  if (top.has("eigenvalue_count") && c.scenario != Scenario::kSpectrum &&
      c.scenario != Scenario::kSweep) {
    throw ConfigError("eigenvalue_count", "only valid for spectrum and sweep scenarios");
  }
  c.eigenvalue_count = positive_size(top.integer("eigenvalue_count"), "eigenvalue_count", 10);
  if (top.has("convergence_check") && c.scenario != Scenario::kSpectrum) {
    throw ConfigError("convergence_check", "only valid for spectrum scenarios");
  }
  c.convergence_check = top.boolean("convergence_check").value_or(true);

  const json* sweep = top.get("sweep");
  if (c.scenario == Scenario::kSweep) {
    if (!sweep) throw ConfigError("sweep", "required for sweep scenarios");
    ObjectReader r(*sweep, "sweep");
    auto param = r.string("parameter");
    if (!param) throw ConfigError("sweep.parameter", "missing required key");
    const auto& allowed = c.model == Scenario::kCooling ? kCoolingKeys : kBoseHubbardKeys;
    if (std::find(allowed.begin(), allowed.end(), *param) == allowed.end() || *param == "Z" ||
        *param == "Y") {
      throw ConfigError("sweep.parameter", "not a sweepable parameter of this model");
    }
    c.sweep_parameter = *param;
    const json* values = r.get("values");
    if (!values) throw ConfigError("sweep.values", "missing required key");
    c.sweep_values = number_list(*values, "sweep.values");
    if (c.sweep_values.empty()) throw ConfigError("sweep.values", "expected at least one value");
    r.reject_unknown();
    // Every point has to be a valid parameter set on its own.
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
      ScenarioConfig probe = c;
      set_param(probe, c.sweep_parameter, json(c.sweep_values[i]),
                "sweep.values[" + std::to_string(i) + "]");
      validate_params(probe);
    }
  } else if (sweep) {
    throw ConfigError("sweep", "only valid for sweep scenarios");
  }

  top.reject_unknown();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("$", std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Regime checks

namespace {

bool has_tier(const ScenarioConfig& c, Tier t) {
  return std::find(c.tiers.begin(), c.tiers.end(), t) != c.tiers.end();
}

std::size_t superoperator_dim(const ScenarioConfig& c, Tier t, std::size_t photon_cutoff) {
  std::size_t d = 0;
  if (c.model == Scenario::kCooling) {
    d = c.cooling.ladder.dim() * (t == Tier::kFull ? photon_cutoff : 1);
  } else {
    d = LatticeFockBasis(c.bh.L, c.bh.N).dim() * (t == Tier::kFull ? photon_cutoff : 1);
  }
  return d * d;
}

std::size_t cutoff_of(const ScenarioConfig& c) {
  return c.model == Scenario::kCooling ? c.cooling.photon_cutoff : c.bh.photon_cutoff;
}

void check_cooling_point(const ScenarioConfig& c) {
  const CoolingParams& p = c.cooling;
  const bool weak = has_tier(c, Tier::kAtomOnly) || has_tier(c, Tier::kRateEquation) ||
                    has_tier(c, Tier::kGaussianAnsatz);
  if (weak && std::abs(p.eta) / p.kappa > kWeakCouplingLimit) {
    std::ostringstream os;
    os << "|eta|/kappa = " << std::abs(p.eta) / p.kappa << " exceeds " << kWeakCouplingLimit
       << "; the atom-only tiers are outside their regime";
    throw Error(ErrorKind::kRegime, os.str());
  }
  if (has_tier(c, Tier::kGaussianAnsatz)) gaussian_ansatz(p);
  if (c.scenario == Scenario::kSweep && has_tier(c, Tier::kRateEquation)) {
    detailed_balance_steady_state(p);
  }
}

}  // namespace

double resolved_t_final(const ScenarioConfig& c) {
  if (c.t_final) return *c.t_final;
  if (c.model == Scenario::kCooling) {
    const std::string key = "t_final_times_omega_R";
    if (!(c.cooling.delta < 0.0)) {
      throw ConfigError(key, "no default end time without cooling (delta >= 0); set it explicitly");
    }
    const double g = gaussian_ansatz(c.cooling).gamma_c;
    if (!(g > 0.0)) throw ConfigError(key, "no default end time at zero cooling rate; set it explicitly");
    return 5.0 / g;
  }
  const double g = bh_gamma(c.bh);
  if (!(g > 0.0)) throw ConfigError("t_final_times_J", "no default end time at zero coupling; set it explicitly");
  return 2.0 / g;
}

void check_regime(const ScenarioConfig& c) {
  if (c.scenario == Scenario::kCooling || c.scenario == Scenario::kBoseHubbard) {
    resolved_t_final(c);
  }
  if (c.scenario == Scenario::kSpectrum) {
    for (std::size_t i = 0; i < c.tiers.size(); ++i) {
      const std::size_t n = superoperator_dim(c, c.tiers[i], cutoff_of(c));
      if (n > kDefaultSuperoperatorCap) {
        throw ConfigError("tiers[" + std::to_string(i) + "]",
                          "superoperator dimension " + std::to_string(n) + " exceeds " +
                              std::to_string(kDefaultSuperoperatorCap) +
                              "; lower n_max or photon_cutoff");
      }
    }
  }
  if (c.model == Scenario::kCooling) {
    if (c.scenario == Scenario::kSweep) {
      for (double v : c.sweep_values) {
        ScenarioConfig point = c;
        set_param(point, c.sweep_parameter, json(v), "sweep.values");
        check_cooling_point(point);
      }
    } else {
      check_cooling_point(c);
    }
  }
  if (c.scenario == Scenario::kSweep && c.model == Scenario::kBoseHubbard) {
    for (std::size_t i = 0; i < c.tiers.size(); ++i) {
      if (superoperator_dim(c, c.tiers[i], cutoff_of(c)) > kDefaultSuperoperatorCap) {
        throw ConfigError("tiers[" + std::to_string(i) + "]",
                          "superoperator dimension exceeds the dense cap");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Tier workers

namespace {

struct TierResult {
  std::string tier;
  std::vector<ObservableSeries> series;
  json diagnostics = json::object();
  json validity = json::object();
  std::vector<std::string> warnings;
};

std::vector<double> time_grid(double t_final, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = t_final * double(k) / double(n - 1);
  t.back() = t_final;
  return t;
}

ObservableSeries make_series(std::string name, std::string units, std::vector<double> times,
                             std::vector<cplx> values) {
  ObservableSeries s;
  s.name = std::move(name);
  s.units = std::move(units);
  s.times = std::move(times);
  s.values = std::move(values);
  s.validate();
  return s;
}

std::vector<cplx> real_values(const std::vector<double>& v) {
  return std::vector<cplx>(v.begin(), v.end());
}

json validity_json(const ValidityReport& r) {
  json items = json::array();
  for (const auto& d : r.items) {
    items.push_back({{"name", d.name}, {"value", d.value}, {"verdict", to_string(d.verdict)}});
  }
  return {{"items", items}, {"worst", to_string(r.worst())}};
}

double max_real(const std::vector<cplx>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& x : v) m = std::max(m, x.real());
  return m;
}

void add_integration_diagnostics(const Trajectory& tr, json& d) {
  d["trace_drift"] = tr.max_trace_drift;
  d["accepted_steps"] = tr.accepted_steps;
  d["rejected_steps"] = tr.rejected_steps;
}

void warn_weak_coupling(const ValidityReport& r, TierResult& out) {
  for (const auto& d : r.items) {
    if (d.verdict != Verdict::kPass) {
      std::ostringstream os;
      os << out.tier << ": " << d.name << " = " << d.value << " (" << to_string(d.verdict) << ")";
      out.warnings.push_back(os.str());
    }
  }
}

double boundary_occupation(const Eigen::VectorXd& pops, const MomentumLadder& ladder) {
  return pops(static_cast<Eigen::Index>(ladder.index(ladder.n_max()))) +
         pops(static_cast<Eigen::Index>(ladder.index(-ladder.n_max())));
}

constexpr double kBoundaryWarn = 1e-6;
constexpr double kTopPhotonWarn = 1e-6;

void warn_if(bool cond, TierResult& out, const std::string& what) {
  if (cond) out.warnings.push_back(out.tier + ": " + what);
}

TierResult run_cooling_tier(const ScenarioConfig& c, Tier tier, const std::vector<double>& t) {
  const CoolingParams& p = c.cooling;
  TierResult out;
  out.tier = std::string(to_string(tier));
  const std::string energy_units = "hbar*omega_R";

  if (tier == Tier::kGaussianAnsatz) {
    const auto coeffs = gaussian_ansatz(p);
    const double e0 = kinetic_energy(thermal_distribution(p.ladder, c.initial_temperature), p.ladder);
    out.series.push_back(gaussian_ansatz_trajectory(coeffs, e0, t));
    out.diagnostics = {{"gamma_c", coeffs.gamma_c}, {"h", coeffs.h}, {"E_ss", coeffs.E_ss}};
    return out;
  }

  if (tier == Tier::kRateEquation) {
    const auto traj = evolve_rate_equations(p, thermal_distribution(p.ladder, c.initial_temperature), t);
    std::vector<double> e, k;
    double boundary = 0.0;
    for (const auto& pi : traj.populations) {
      e.push_back(kinetic_energy(pi, p.ladder));
      k.push_back(kurtosis(pi, p.ladder));
      boundary = std::max(boundary, boundary_occupation(pi, p.ladder));
    }
    out.series.push_back(make_series("E_kin", energy_units, t, real_values(e)));
    out.series.push_back(make_series("kurtosis", "dimensionless", t, real_values(k)));
    out.diagnostics = {{"population_leakage", traj.max_leakage}, {"boundary_occupation", boundary}};
    try {
      const Eigen::VectorXd ss = detailed_balance_steady_state(p);
      out.diagnostics["E_kin_detailed_balance"] = kinetic_energy(ss, p.ladder);
      out.diagnostics["kurtosis_detailed_balance"] = kurtosis(ss, p.ladder);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::kNonNormalizable) throw;
      out.warnings.push_back(out.tier + ": " + err.what());
    }
    warn_if(boundary > kBoundaryWarn, out, "momentum ladder edge is populated; raise n_max");
    return out;
  }

  const bool full = tier == Tier::kFull;
  const LindbladModel model = full ? build_full_cooling_model(p) : build_atom_only_cooling_model(p);
  const DensityState thermal = thermal_state(p.ladder, c.initial_temperature);
  std::optional<DensityState> rho0;
  if (full) {
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(p.photon_cutoff));
    vac(0) = 1.0;
    rho0.emplace(tensor(thermal, DensityState::pure(
                                     SpaceDescriptor(std::string(kPhotonLabel), p.photon_cutoff), vac)));
  } else {
    rho0.emplace(thermal);
  }
  const OperatorMatrix alpha = build_alpha_operator(p);

  double boundary = 0.0, top_photon = 0.0, min_eig = std::numeric_limits<double>::infinity();
  std::optional<OperatorMatrix> last;
  std::vector<NamedObservable> obs{
      {"E_kin", [&](const OperatorMatrix& r) { return cplx(kinetic_energy(r, p.ladder)); }},
      {"kurtosis", [&](const OperatorMatrix& r) { return cplx(kurtosis(r, p.ladder)); }},
      {"photon_number",
       [&](const OperatorMatrix& r) {
         return cplx(full ? lab_frame_photon_number(r) : lab_frame_photon_number(r, alpha));
       }},
      {"_diagnostics", [&](const OperatorMatrix& r) {
         boundary = std::max(boundary, boundary_occupation(momentum_distribution(r), p.ladder));
         if (full) {
           const OperatorMatrix ph = reduce_to(r, kPhotonLabel);
           const auto top = static_cast<Eigen::Index>(ph.dim()) - 1;
           top_photon = std::max(top_photon, ph(top, top).real());
         }
         min_eig = std::min(min_eig, min_eigenvalue(r));
         last = r;
         return cplx(0.0);
       }}};
  const Trajectory tr = evolve(model, *rho0, t, c.evolve, obs);

  out.series.push_back(make_series("E_kin", energy_units, t, tr.observable("E_kin")));
  out.series.push_back(make_series("kurtosis", "dimensionless", t, tr.observable("kurtosis")));
  out.series.push_back(make_series("photon_number", "photons", t, tr.observable("photon_number")));
  add_integration_diagnostics(tr, out.diagnostics);
  out.diagnostics["boundary_occupation"] = boundary;
  out.diagnostics["min_eigenvalue"] = min_eig;
  if (full) out.diagnostics["top_photon_occupation"] = top_photon;
  warn_if(boundary > kBoundaryWarn, out, "momentum ladder edge is populated; raise n_max");
  warn_if(top_photon > kTopPhotonWarn, out, "highest photon level is populated; raise photon_cutoff");

  const ValidityReport report = weak_coupling_validity(p, *last);
  out.validity = validity_json(report);
  warn_weak_coupling(report, out);
  return out;
}

OperatorMatrix total_boson_number(const LatticeFockBasis& basis) {
  const SiteOperators ops = site_operators(basis);
  OperatorMatrix n = OperatorMatrix::zero(basis.space());
  for (const auto& d : ops.density) n += d;
  return n;
}

json epsilon_json(const BHParams& p) {
  const EpsilonReport e = epsilon_report(p, 0.0);
  ValidityReport r;
  r.items.push_back({"eps2", e.eps2, grade(e.eps2)});
  r.items.push_back({"elimination_ratio", e.elimination_ratio, grade(e.elimination_ratio)});
  json v = validity_json(r);
  v["eps_fig3"] = e.eps_fig3;
  v["gamma_heat_per_J"] = e.gamma_heat / p.J;
  return v;
}

// Steady <a^dag a> at cutoff and cutoff + 2; only attempted while the larger
// superoperator stays small enough for a quick dense solve.
constexpr std::size_t kCutoffCheckCap = 2500;

void photon_cutoff_check(const BHParams& p, TierResult& out) {
  const std::size_t atoms = LatticeFockBasis(p.L, p.N).dim();
  const std::size_t big = atoms * (p.photon_cutoff + 2);
  if (big * big > kCutoffCheckCap) {
    out.diagnostics["photon_cutoff_check"] = "skipped (superoperator too large)";
    return;
  }
  BHParams wide = p;
  wide.photon_cutoff += 2;
  const double n0 = lab_frame_photon_number(steady_state(build_full_bh_model(p)).matrix());
  const double n2 = lab_frame_photon_number(steady_state(build_full_bh_model(wide)).matrix());
  const double rel = std::abs(n2 - n0) / std::max(std::abs(n2), 1e-300);
  out.diagnostics["photon_cutoff_check"] = {{"steady_photon_number", n0},
                                            {"steady_photon_number_cutoff_plus_2", n2},
                                            {"relative_change", rel}};
  warn_if(rel > 0.01, out, "steady photon number changes by more than 1% at photon_cutoff + 2");
}

TierResult run_bh_tier(const ScenarioConfig& c, Tier tier, const std::vector<double>& t) {
  const BHParams& p = c.bh;
  TierResult out;
  out.tier = std::string(to_string(tier));
  const LatticeFockBasis basis(p.L, p.N);
  const OperatorMatrix hs = build_bh_hamiltonian(p);
  const GroundState gs = ground_state(hs);
  const DensityState atoms = DensityState::pure(hs.space(), gs.vector);
  const OperatorMatrix theta = build_theta_bh(p);
  const double n2 = p.N > 0 ? double(p.N) * double(p.N) : 1.0;
  OperatorMatrix theta_sq = theta * theta * cplx(1.0 / n2);
  OperatorMatrix number = total_boson_number(basis);

  std::optional<LindbladModel> model;
  std::optional<DensityState> rho0;
  std::optional<OperatorMatrix> alpha;
  const bool full = tier == Tier::kFull;
  if (full) {
    model.emplace(build_full_bh_model(p));
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(p.photon_cutoff));
    vac(0) = 1.0;
    const SpaceDescriptor photon(std::string(kPhotonLabel), p.photon_cutoff);
    rho0.emplace(tensor(atoms, DensityState::pure(photon, vac)));
    const OperatorMatrix id = OperatorMatrix::identity(photon);
    theta_sq = tensor(theta_sq, id);
    number = tensor(number, id);
  } else if (tier == Tier::kAdiabatic) {
    model.emplace(build_adiabatic_bh_model(p));
    rho0.emplace(atoms);
    alpha = build_alpha0_bh(p);
  } else {
    model.emplace(build_diabatic_bh_model(p));
    rho0.emplace(atoms);
    alpha = build_alpha0_bh(p) + build_alpha1_bh(p);
  }

  double number_drift = 0.0, top_photon = 0.0, min_eig = std::numeric_limits<double>::infinity();
  std::vector<NamedObservable> obs{
      {"theta_sq_per_N2", [&](const OperatorMatrix& r) { return cplx(expectation(theta_sq, r).real()); }},
      {"photon_number",
       [&](const OperatorMatrix& r) {
         return cplx(full ? lab_frame_photon_number(r) : lab_frame_photon_number(r, *alpha));
       }},
      {"_diagnostics", [&](const OperatorMatrix& r) {
         number_drift = std::max(number_drift,
                                 std::abs(expectation(number, r).real() - double(p.N) * r.trace().real()));
         if (full) {
           const OperatorMatrix ph = reduce_to(r, kPhotonLabel);
           const auto top = static_cast<Eigen::Index>(ph.dim()) - 1;
           top_photon = std::max(top_photon, ph(top, top).real());
         }
         min_eig = std::min(min_eig, min_eigenvalue(r));
         return cplx(0.0);
       }}};
  const Trajectory tr = evolve(*model, *rho0, t, c.evolve, obs);
  out.series.push_back(make_series("theta_sq_per_N2", "dimensionless", t, tr.observable("theta_sq_per_N2")));
  out.series.push_back(make_series("photon_number", "photons", t, tr.observable("photon_number")));
  add_integration_diagnostics(tr, out.diagnostics);
  out.diagnostics["boson_number_drift"] = number_drift;
  out.diagnostics["min_eigenvalue"] = min_eig;
  out.diagnostics["ground_state_energy_per_J"] = gs.energy / p.J;
  if (full) {
    out.diagnostics["top_photon_occupation"] = top_photon;
    warn_if(top_photon > kTopPhotonWarn, out, "highest photon level is populated; raise photon_cutoff");
    photon_cutoff_check(p, out);
  }
  out.validity = epsilon_json(p);
  return out;
}

LindbladModel spectrum_model(const ScenarioConfig& c, Tier tier, std::size_t cutoff) {
  if (c.model == Scenario::kCooling) {
    CoolingParams p = c.cooling;
    p.photon_cutoff = cutoff;
    return tier == Tier::kFull ? build_full_cooling_model(p) : build_atom_only_cooling_model(p);
  }
  BHParams p = c.bh;
  p.photon_cutoff = cutoff;
  switch (tier) {
    case Tier::kFull: return build_full_bh_model(p);
    case Tier::kAdiabatic: return build_adiabatic_bh_model(p);
    default: return build_diabatic_bh_model(p);
  }
}

json eigenvalue_list(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back({x.real(), x.imag()});
  return a;
}

struct SpectrumResult {
  TierResult base;
  std::vector<cplx> slowest;
  std::vector<cplx> every;
  json convergence;
};

SpectrumResult run_spectrum_tier(const ScenarioConfig& c, Tier tier) {
  SpectrumResult out;
  out.base.tier = std::string(to_string(tier));
  const std::size_t cutoff = cutoff_of(c);
  const Eigen::VectorXcd all = liouvillian_eigenvalues(spectrum_model(c, tier, cutoff));
  const std::size_t count = std::min<std::size_t>(c.eigenvalue_count, static_cast<std::size_t>(all.size()));
  out.slowest = slowest_eigenvalues(all, count);
  out.every = slowest_eigenvalues(all, static_cast<std::size_t>(all.size()));
  const std::vector<cplx>& every = out.every;
  out.base.diagnostics = {{"superoperator_dim", all.size()}, {"max_real_part", max_real(every)}};
  if (max_real(every) > 1e-9) {
    out.base.warnings.push_back(out.base.tier + ": eigenvalue with positive real part");
  }
  if (tier == Tier::kFull && c.convergence_check) {
    const std::size_t n = superoperator_dim(c, tier, cutoff + 1);
    if (n > kDefaultSuperoperatorCap) {
      out.convergence = {{"photon_cutoff", cutoff + 1}, {"status", "skipped (above size cap)"}};
      out.base.warnings.push_back(out.base.tier + ": cutoff convergence check skipped (above size cap)");
    } else {
      const auto wider = slowest_eigenvalues(
          liouvillian_eigenvalues(spectrum_model(c, tier, cutoff + 1)), count);
      double shift = 0.0;
      for (std::size_t k = 0; k < count; ++k) shift = std::max(shift, std::abs(wider[k] - out.slowest[k]));
      const bool ok = shift <= c.eigenvalue_tol;
      out.convergence = {{"photon_cutoff", cutoff + 1},
                         {"max_shift", shift},
                         {"tolerance", c.eigenvalue_tol},
                         {"status", ok ? "converged" : "not converged"}};
      warn_if(!ok, out.base, "slowest eigenvalues not converged in photon_cutoff");
    }
    out.base.diagnostics["convergence"] = out.convergence;
  }
  if (c.model == Scenario::kBoseHubbard) out.base.validity = epsilon_json(c.bh);
  return out;
}

// Sweep points are independent; each tier walks all of them.
TierResult run_sweep_tier(const ScenarioConfig& c, Tier tier) {
  TierResult out;
  out.tier = std::string(to_string(tier));
  std::map<std::string, std::pair<std::string, std::vector<double>>> columns;
  auto push = [&columns](const std::string& name, const std::string& units, double v) {
    auto& col = columns[name];
    col.first = units;
    col.second.push_back(v);
  };
  json points = json::array();
  for (double value : c.sweep_values) {
    ScenarioConfig point = c;
    set_param(point, c.sweep_parameter, json(value), "sweep.values");
    if (c.model == Scenario::kCooling) {
      const CoolingParams& p = point.cooling;
      if (tier == Tier::kGaussianAnsatz) {
        const auto g = gaussian_ansatz(p);
        push("gamma_c", "omega_R", g.gamma_c);
        push("h", "dimensionless", g.h);
        push("E_ss", "hbar*omega_R", g.E_ss);
      } else {
        const Eigen::VectorXd ss = detailed_balance_steady_state(p);
        push("E_kin_steady", "hbar*omega_R", kinetic_energy(ss, p.ladder));
        push("kurtosis_steady", "dimensionless", kurtosis(ss, p.ladder));
      }
    } else {
      const auto slow = slowest_eigenvalues(
          liouvillian_eigenvalues(spectrum_model(point, tier, point.bh.photon_cutoff)),
          std::max<std::size_t>(2, c.eigenvalue_count));
      push("slowest_decay_rate", "J", -slow[1].real());
      const EpsilonReport e = epsilon_report(point.bh, 0.0);
      push("eps_fig3", "dimensionless", e.eps_fig3);
      points.push_back({{"value", value}, {"eps_fig3", e.eps_fig3}, {"eps2", e.eps2}});
    }
  }
  for (auto& [name, col] : columns) {
    ObservableSeries s = make_series(name, col.first, c.sweep_values, real_values(col.second));
    s.abscissa = c.sweep_parameter;
    out.series.push_back(std::move(s));
  }
  if (!points.empty()) out.validity = {{"points", points}};
  return out;
}

}  // namespace

RunOutput run_scenario(const ScenarioConfig& c) {
  check_regime(c);
  RunOutput out;
  std::vector<std::future<TierResult>> jobs;
  std::vector<std::future<SpectrumResult>> spectra;
  if (c.scenario == Scenario::kSpectrum) {
    for (Tier tier : c.tiers) {
      spectra.push_back(std::async(std::launch::async, [&c, tier] { return run_spectrum_tier(c, tier); }));
    }
  } else if (c.scenario == Scenario::kSweep) {
    for (Tier tier : c.tiers) {
      jobs.push_back(std::async(std::launch::async, [&c, tier] { return run_sweep_tier(c, tier); }));
    }
  } else {
    const auto t = time_grid(resolved_t_final(c), c.n_samples);
    for (Tier tier : c.tiers) {
      jobs.push_back(std::async(std::launch::async, [&c, tier, t] {
        return c.model == Scenario::kCooling ? run_cooling_tier(c, tier, t) : run_bh_tier(c, tier, t);
      }));
    }
  }

  // Wait for every worker before reporting the first failure.
  std::vector<TierResult> results;
  std::exception_ptr first_error;
  json spectra_doc;
  if (!spectra.empty()) {
    spectra_doc = {{"model", to_string(c.model)},
                   {"units", c.model == Scenario::kCooling ? "omega_R" : "J"},
                   {"count", c.eigenvalue_count},
                   {"order", "descending real part"},
                   {"tiers", json::object()},
                   {"all", json::object()}};
  }
  for (auto& f : spectra) {
    try {
      SpectrumResult r = f.get();
      spectra_doc["tiers"][r.base.tier] = eigenvalue_list(r.slowest);
      spectra_doc["all"][r.base.tier] = eigenvalue_list(r.every);
      if (!r.convergence.is_null()) spectra_doc["convergence"][r.base.tier] = r.convergence;
      results.push_back(std::move(r.base));
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  for (auto& f : jobs) {
    try {
      results.push_back(f.get());
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  for (auto& r : results) {
    for (auto& s : r.series) out.series.emplace(r.tier + "/" + s.name, std::move(s));
    out.diagnostics[r.tier] = r.diagnostics;
    if (!r.validity.empty()) out.validity[r.tier] = r.validity;
    out.warnings.insert(out.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  if (!spectra.empty()) out.spectra = std::move(spectra_doc);
  return out;
}

// ---------------------------------------------------------------------------
// Files

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_csv(const ObservableSeries& s) {
  s.validate();
  std::string out = s.abscissa + (s.complex_valued ? ",value,value_imag\n" : ",value\n");
  char buf[96];
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    if (s.complex_valued) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.times[k], s.values[k].real(),
                    s.values[k].imag());
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", s.times[k], s.values[k].real());
    }
    out += buf;
  }
  return out;
}

ObservableSeries read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("series", "missing series file " + path.string());
  ObservableSeries s;
  s.name = path.stem().string();
  s.units = "unknown";
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kShape, "empty series file " + path.string());
  const auto cols = std::count(line.begin(), line.end(), ',') + 1;
  if (cols < 2 || cols > 3) throw Error(ErrorKind::kShape, "unexpected header in " + path.string());
  s.abscissa = line.substr(0, line.find(','));
  s.complex_valued = cols == 3;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    if (s.complex_valued) std::getline(row, c, ',');
    try {
      s.times.push_back(std::stod(a));
      s.values.emplace_back(std::stod(b), s.complex_valued ? std::stod(c) : 0.0);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kShape, "malformed row in " + path.string() + ": " + line);
    }
  }
  return s;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << bytes;
  if (!f) throw Error(ErrorKind::kNumerical, "cannot write " + path.string());
}

}  // namespace

void write_run(const ScenarioConfig& c, const RunOutput& out, const std::filesystem::path& dir,
               double wall_time_seconds) {
  json files = json::array();
  auto emit = [&](const std::string& rel, const std::string& bytes) {
    write_file(dir / rel, bytes);
    files.push_back({{"path", rel}, {"bytes", bytes.size()}, {"fnv1a64", fnv1a64(bytes)}});
  };
  json series = json::array();
  for (const auto& [key, s] : out.series) {
    emit(key + ".csv", format_csv(s));
    series.push_back({{"path", key + ".csv"}, {"name", s.name}, {"units", s.units}, {"abscissa", s.abscissa}});
  }
  if (out.spectra) emit("spectra.json", out.spectra->dump(2) + "\n");

  json manifest = {{"code_version", CQED_VERSION},
                   {"config", c.source},
                   {"scenario", to_string(c.scenario)},
                   {"wall_time_seconds", wall_time_seconds}};
  if (c.scenario == Scenario::kCooling || c.scenario == Scenario::kBoseHubbard) {
    manifest[c.model == Scenario::kCooling ? "t_final_times_omega_R" : "t_final_times_J"] =
        resolved_t_final(c);
    manifest["n_samples"] = c.n_samples;
  }
  manifest["series"] = series;
  manifest["files"] = files;
  manifest["diagnostics"] = out.diagnostics;
  manifest["validity"] = out.validity;
  manifest["warnings"] = out.warnings;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Compare

namespace {

cplx interpolate(const ObservableSeries& s, double t) {
  auto it = std::lower_bound(s.times.begin(), s.times.end(), t);
  if (it == s.times.end()) return s.values.back();
  const auto k = static_cast<std::size_t>(it - s.times.begin());
  if (*it == t || k == 0) return s.values[k];
  const double w = (t - s.times[k - 1]) / (s.times[k] - s.times[k - 1]);
  return (1.0 - w) * s.values[k - 1] + w * s.values[k];
}

void check_increasing(const ObservableSeries& s) {
  if (s.times.empty()) throw Error(ErrorKind::kShape, "series " + s.name + " is empty");
  for (std::size_t k = 1; k < s.times.size(); ++k) {
    if (!(s.times[k] > s.times[k - 1])) {
      throw Error(ErrorKind::kShape, "series " + s.name + " is not sampled on an increasing grid");
    }
  }
}

}  // namespace

CompareReport compare_series(const ObservableSeries& a, const ObservableSeries& b, double tol) {
  check_increasing(a);
  check_increasing(b);
  CompareReport r;
  r.series_a = a.name;
  r.series_b = b.name;
  r.tolerance = tol;
  const double lo = std::max(a.times.front(), b.times.front());
  const double hi = std::min(a.times.back(), b.times.back());
  if (lo > hi) throw Error(ErrorKind::kShape, "series do not overlap in time");
  auto inside = [lo, hi](const ObservableSeries& s) {
    return std::count_if(s.times.begin(), s.times.end(), [&](double t) { return t >= lo && t <= hi; });
  };
  const bool a_coarse = inside(a) <= inside(b);
  const ObservableSeries& grid = a_coarse ? a : b;
  const ObservableSeries& other = a_coarse ? b : a;
  for (std::size_t k = 0; k < grid.times.size(); ++k) {
    const double t = grid.times[k];
    if (t < lo || t > hi) continue;
    const cplx u = grid.values[k], v = interpolate(other, t);
    const double scale = std::max(std::abs(u), std::abs(v));
    const double dev = scale == 0.0 ? 0.0 : std::abs(u - v) / scale;
    if (dev > r.max_relative_deviation || r.points == 0) {
      r.max_relative_deviation = std::max(r.max_relative_deviation, dev);
      if (dev >= r.max_relative_deviation) r.at_time = t;
    }
    ++r.points;
  }
  r.pass = r.max_relative_deviation <= tol;
  return r;
}

CompareReport compare_runs(const std::filesystem::path& dir_a, const std::filesystem::path& dir_b,
                           const std::string& series_a, const std::string& series_b, double tol) {
  const auto pa = dir_a / (series_a + ".csv");
  const auto pb = dir_b / (series_b + ".csv");
  if (!std::filesystem::exists(pa)) throw ConfigError("series", "no series " + series_a + " in " + dir_a.string());
  if (!std::filesystem::exists(pb)) throw ConfigError("series", "no series " + series_b + " in " + dir_b.string());
  return compare_series(read_csv(pa), read_csv(pb), tol);
}

// ---------------------------------------------------------------------------
// Errors

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kConfig:
    case ErrorKind::kInvalidDimension:
    case ErrorKind::kSize:
      return 2;
    case ErrorKind::kRegime:
    case ErrorKind::kNoCooling:
    case ErrorKind::kNonNormalizable:
      return 3;
    default:
      return 4;
  }
}

json error_record(const Error& e) {
  json r = {{"error", to_string(e.kind())}, {"message", e.what()}, {"exit_code", exit_code_for(e)}};
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) r["field"] = ce->field_path();
  if (const auto* se = dynamic_cast<const StiffnessError*>(&e)) r["time_reached"] = se->time_reached();
  return r;
}

}  // namespace cqed
