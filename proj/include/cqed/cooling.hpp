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

// Cavity cooling of a single atom on the momentum ladder: the full
// atom-cavity model, the weak-coupling atom-only Lindbladian, the classical
// rate equations and the Gaussian ansatz. Frequencies are absolute; with
// recoil = 1 they are in units of the recoil frequency.

#ifndef CQED_COOLING_HPP
#define CQED_COOLING_HPP

#include <Eigen/Dense>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/lindblad.hpp"

namespace cqed {

struct CoolingParams {
  double eta = 1.0;    ///< pump-cavity scattering rate, taken real
  double delta = -20.0;
  double kappa = 20.0;
  double dispersive_shift = 0.0;  ///< U, full model only
  MomentumLadder ladder{40};
  std::size_t photon_cutoff = 6;  ///< Fock levels kept in the full model

  /// Throws kConfig for kappa <= 0 or photon_cutoff < 2.
  void validate() const;
};

/// |eta|/kappa above which atom-only constructions are refused.
inline constexpr double kWeakCouplingLimit = 0.5;
/// |eta|/kappa above which the CLI warns.
inline constexpr double kWeakCouplingWarn = 0.2;

/// Ladder (x) photon model with H = p^2/2m - Delta a^dag a + U cos^2 a^dag a
/// + eta cos (a + a^dag) and loss (kappa, a).
LindbladModel build_full_cooling_model(const CoolingParams& p);

/// (alpha_-, alpha_+) at momentum n hbar k.
std::pair<cplx, cplx> alpha_pm(const CoolingParams& p, int n);

/// sum_n alpha_-(n)|n-1><n| + alpha_+(n)|n+1><n|, boundary terms dropped.
OperatorMatrix build_alpha_operator(const CoolingParams& p);

/// Ladder-only model with H = p^2/2m + (eta/2)(alpha^dag cos + cos alpha) and
/// loss (kappa, alpha). Throws kRegime if |eta|/kappa > kWeakCouplingLimit.
LindbladModel build_atom_only_cooling_model(const CoolingParams& p);

/// Generator M of dPi/dt = M Pi. Outflow across the grid edge stays on the
/// diagonal, so edge columns leak.
Eigen::MatrixXd rate_matrix(const CoolingParams& p);

struct GaussianAnsatzCoefficients {
  double gamma_c = 0.0;
  double h = 0.0;
  double E_ss = 0.0;
};

/// Throws kNoCooling for Delta >= 0.
GaussianAnsatzCoefficients gaussian_ansatz(const CoolingParams& p);

/// Stationary populations from detailed balance, normalised on the grid.
/// Throws kNonNormalizable for Delta >= -recoil/2.
Eigen::VectorXd detailed_balance_steady_state(const CoolingParams& p);

/// Pi_n proportional to exp(-n^2 recoil / temperature) (temperature in
/// energy units, k_B = 1).
Eigen::VectorXd thermal_distribution(const MomentumLadder& ladder, double temperature);
DensityState thermal_state(const MomentumLadder& ladder, double temperature);

struct RateTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> populations;
  /// Largest |1 - sum(Pi)| seen at the sample times.
  double max_leakage = 0.0;
};

RateTrajectory evolve_rate_equations(const CoolingParams& p, const Eigen::VectorXd& pi0,
                                     std::span<const double> t_grid, double rel_tol = 1e-10,
                                     double abs_tol = 1e-14);

enum class Verdict { kPass, kWarn, kFail };
std::string_view to_string(Verdict v);

/// pass below 0.1, warn below 0.3, fail otherwise.
Verdict grade(double value);

struct Diagnostic {
  std::string name;
  double value = 0.0;
  Verdict verdict = Verdict::kPass;
};

struct ValidityReport {
  std::vector<Diagnostic> items;
  Verdict worst() const;
};

/// <alpha^dag alpha>, |eta|/kappa, |U <cos^2>|/kappa and gamma_c/kappa for a
/// state on the ladder (a ladder (x) photon state is reduced first).
ValidityReport weak_coupling_validity(const CoolingParams& p, const OperatorMatrix& state);

}  // namespace cqed

#endif  // CQED_COOLING_HPP
