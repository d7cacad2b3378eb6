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

// Extended Bose-Hubbard models of a lattice gas in a single-mode cavity:
// the full atom-cavity Lindbladian, the adiabatic and diabatic atom-only
// Lindbladians and their validity parameters. Energies are in units of J
// when J = 1.

#ifndef CQED_BOSE_HUBBARD_HPP
#define CQED_BOSE_HUBBARD_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/lindblad.hpp"

namespace cqed {

struct BHParams {
  double J = 1.0;
  double u = 2.5;
  int L = 4;
  int N = 2;
  double eta = 100.0;
  double delta = -500.0;
  double kappa = 500.0;
  /// Site weights Z_j (length L); empty selects (-1)^j with j = 1..L.
  std::vector<double> Z;
  /// Bond weights Y_j (length L-1); empty selects zeros.
  std::vector<double> Y;
  std::size_t photon_cutoff = 6;  ///< Fock levels kept in the full model

  /// Throws ConfigError for kappa <= 0, L < 2, N < 0, photon_cutoff < 2 or
  /// weight lists of the wrong length.
  void validate() const;
  std::vector<double> site_weights() const;
  std::vector<double> bond_weights() const;
  /// True when Z = (-1)^j and Y = 0.
  bool default_weights() const;
};

/// -J sum_j (b_j^dag b_{j+1} + h.c.) + (u/2) sum_j n_j (n_j - 1), open chain.
OperatorMatrix build_bh_hamiltonian(const BHParams& p);
/// sum_j Z_j n_j + sum_j Y_j (b_j^dag b_{j+1} + h.c.).
OperatorMatrix build_theta_bh(const BHParams& p);

/// Lattice (x) photon model with H = H_S - Delta a^dag a + eta Theta (a + a^dag)
/// and loss (kappa, a).
LindbladModel build_full_bh_model(const BHParams& p);

/// eta / (Delta + i kappa) Theta.
OperatorMatrix build_alpha0_bh(const BHParams& p);
/// First diabatic correction. Closed form 2 J eta / (Delta + i kappa)^2
/// sum_j (-1)^j (b_j^dag b_{j+1} - h.c.) for default weights, otherwise
/// alpha1_from_commutator.
OperatorMatrix build_alpha1_bh(const BHParams& p);
/// alpha_1 = -chi^-1 (-i [H_S, alpha_0]) with chi = i Delta - kappa.
OperatorMatrix alpha1_from_commutator(const BHParams& p);

/// Gamma = kappa eta^2 / (Delta^2 + kappa^2).
double bh_gamma(const BHParams& p);

/// H = H_S + Delta eta^2/(Delta^2 + kappa^2) Theta^2, dissipator (Gamma, Theta).
LindbladModel build_adiabatic_bh_model(const BHParams& p);
/// H = H_S + (alpha^dag G + G^dag alpha)/2 with G = eta Theta and
/// alpha = alpha_0 + alpha_1, dissipator (kappa, alpha).
LindbladModel build_diabatic_bh_model(const BHParams& p);

struct EpsilonReport {
  std::optional<double> eps1;           ///< only with a recoil scale
  double eps2 = 0.0;                    ///< |eta| sqrt(N) / |Delta + i kappa|
  double eps_fig3 = 0.0;                ///< eps2^2 = N eta^2 / (Delta^2 + kappa^2)
  double gamma_heat = 0.0;              ///< Gamma
  std::optional<double> adiabatic_lhs;  ///< eps1 * eps2
  /// max(J, u, |eta| sqrt(N)) / |Delta + i kappa|
  double elimination_ratio = 0.0;
};

EpsilonReport epsilon_report(const BHParams& p, double E_kin,
                             std::optional<double> recoil_scale = std::nullopt);

/// weight * left X right
struct SandwichTerm {
  double weight = 0.0;
  OperatorMatrix left;
  OperatorMatrix right;
};

struct DissipatorSum {
  std::string label;
  std::vector<SandwichTerm> terms;
  OperatorMatrix apply(const OperatorMatrix& mu) const;
};

struct HamiltonianSum {
  std::string label;
  OperatorMatrix op;
};

/// The cavity-mediated Hamiltonian Delta eta^2/(Delta^2+kappa^2) Theta^2 split
/// into density-density, density-bond, bond-density and bond-bond sums, and
/// Gamma D[Theta] split into density-density, bond-bond and mixed sums.
struct CqedTerms {
  std::vector<HamiltonianSum> hamiltonian;
  std::vector<DissipatorSum> dissipator;

  OperatorMatrix assembled_hamiltonian() const;
  OperatorMatrix apply_dissipator(const OperatorMatrix& mu) const;
};

CqedTerms expand_cqed_terms(const BHParams& p);

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXcd vector;
};

/// Lowest eigenpair of a Hermitian operator.
GroundState ground_state(const OperatorMatrix& h);

}  // namespace cqed

#endif  // CQED_BOSE_HUBBARD_HPP
