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

// Expectation values, partial traces and the momentum statistics plotted in
// the benchmarks.

#ifndef CQED_OBSERVABLES_HPP
#define CQED_OBSERVABLES_HPP

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cqed/cooling.hpp"
#include "cqed/hilbert.hpp"
#include "cqed/lindblad.hpp"

namespace cqed {

struct ObservableSeries {
  std::string name;
  std::vector<double> times;
  std::vector<cplx> values;
  std::string units;
  bool complex_valued = false;
  /// Header of the first CSV column; sweeps put the swept parameter here.
  std::string abscissa = "time";

  /// Throws kShape on length mismatch or empty units.
  void validate() const;
};

/// Tr(op rho). For Hermitian op an imaginary part above 1e-8 (relative to
/// the operator scale) throws kNumerical.
cplx expectation(const OperatorMatrix& op, const OperatorMatrix& rho);
cplx expectation(const OperatorMatrix& op, const DensityState& rho);

/// Traces out the factor carrying `label`.
OperatorMatrix partial_trace(const OperatorMatrix& rho, std::string_view label);
/// Traces out every factor except `label`.
OperatorMatrix reduce_to(const OperatorMatrix& rho, std::string_view label);

/// Diagonal of the momentum-reduced state.
Eigen::VectorXd momentum_distribution(const OperatorMatrix& rho);

/// sum_n n^2 recoil Pi_n.
double kinetic_energy(const Eigen::VectorXd& populations, const MomentumLadder& ladder);
/// Any photon factor is traced out first; throws kShape without a ladder.
double kinetic_energy(const OperatorMatrix& rho, const MomentumLadder& ladder);

/// <(dp)^4>/<(dp)^2>^2 of the momentum distribution. Throws
/// kUndefinedKurtosis for zero variance.
double kurtosis(const Eigen::VectorXd& populations, const MomentumLadder& ladder);
double kurtosis(const OperatorMatrix& rho, const MomentumLadder& ladder);

/// Full tier: <a^dag a> on the photon factor.
double lab_frame_photon_number(const OperatorMatrix& rho);
/// Atom-only tiers: <alpha^dag alpha> with the tier's alpha.
double lab_frame_photon_number(const OperatorMatrix& rho, const OperatorMatrix& alpha);

/// E(t) = E_ss + (E0 - E_ss) exp(-gamma_c t). Throws kNoCooling for
/// gamma_c <= 0.
ObservableSeries gaussian_ansatz_trajectory(const GaussianAnsatzCoefficients& coeffs,
                                            double E0, std::span<const double> t_grid);

}  // namespace cqed

#endif  // CQED_OBSERVABLES_HPP
