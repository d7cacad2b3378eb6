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

#include "cqed/bose_hubbard.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "cqed/error.hpp"

namespace cqed {

void BHParams::validate() const {
  if (!(kappa > 0.0)) throw ConfigError("kappa", "kappa must be positive");
  if (L < 2) throw ConfigError("L", "need at least two sites");
  if (N < 0) throw ConfigError("N", "boson number must be non-negative");
  if (photon_cutoff < 2) throw ConfigError("photon_cutoff", "photon cutoff must be at least 2");
  if (!Z.empty() && Z.size() != static_cast<std::size_t>(L)) {
    throw ConfigError("Z", "need one site weight per site");
  }
  if (!Y.empty() && Y.size() != static_cast<std::size_t>(L - 1)) {
    throw ConfigError("Y", "need one bond weight per bond");
  }
}

std::vector<double> BHParams::site_weights() const {
  if (!Z.empty()) return Z;
  std::vector<double> z(static_cast<std::size_t>(L));
  for (int j = 1; j <= L; ++j) z[static_cast<std::size_t>(j - 1)] = (j % 2 == 0) ? 1.0 : -1.0;
  return z;
}

std::vector<double> BHParams::bond_weights() const {
  if (!Y.empty()) return Y;
  return std::vector<double>(static_cast<std::size_t>(L - 1), 0.0);
}

bool BHParams::default_weights() const {
  BHParams plain;
  plain.L = L;
  return site_weights() == plain.site_weights() &&
         std::all_of(bond_weights().begin(), bond_weights().end(),
                     [](double y) { return y == 0.0; });
}

namespace {

LatticeFockBasis basis_of(const BHParams& p) {
  p.validate();
  return LatticeFockBasis(p.L, p.N);
}

// b_j^dag b_{j+1} + h.c. for each bond.
std::vector<OperatorMatrix> bonds(const SiteOperators& ops) {
  std::vector<OperatorMatrix> out;
  for (const auto& hop : ops.hop) out.push_back(hop + hop.adjoint());
  return out;
}

cplx detuning(const BHParams& p) { return {p.delta, p.kappa}; }

}  // namespace

OperatorMatrix build_bh_hamiltonian(const BHParams& p) {
  const LatticeFockBasis basis = basis_of(p);
  const SiteOperators ops = site_operators(basis);
  OperatorMatrix h = OperatorMatrix::zero(basis.space());
  for (const auto& b : bonds(ops)) h -= b * cplx(p.J);
  const OperatorMatrix id = OperatorMatrix::identity(basis.space());
  for (const auto& n : ops.density) h += (n * (n - id)) * cplx(0.5 * p.u);
  return h;
}

OperatorMatrix build_theta_bh(const BHParams& p) {
  const LatticeFockBasis basis = basis_of(p);
  const SiteOperators ops = site_operators(basis);
  const auto z = p.site_weights();
  const auto y = p.bond_weights();
  OperatorMatrix theta = OperatorMatrix::zero(basis.space());
  for (std::size_t j = 0; j < ops.density.size(); ++j) theta += ops.density[j] * cplx(z[j]);
  const auto b = bonds(ops);
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (y[j] != 0.0) theta += b[j] * cplx(y[j]);
  }
  return theta;
}

LindbladModel build_full_bh_model(const BHParams& p) {
  const OperatorMatrix hs = build_bh_hamiltonian(p);
  const OperatorMatrix theta = build_theta_bh(p);
  const OperatorMatrix a = fock_annihilation(p.photon_cutoff);
  const OperatorMatrix id_at = OperatorMatrix::identity(hs.space());
  const OperatorMatrix id_ph = OperatorMatrix::identity(a.space());
  OperatorMatrix h = tensor(hs, id_ph);
  h -= tensor(id_at, fock_number(p.photon_cutoff)) * cplx(p.delta);
  h += tensor(theta, a + a.adjoint()) * cplx(p.eta);
  return LindbladModel(std::move(h), {Dissipator{p.kappa, tensor(id_at, a), "cavity loss"}});
}

OperatorMatrix build_alpha0_bh(const BHParams& p) {
  return build_theta_bh(p) * (cplx(p.eta) / detuning(p));
}

OperatorMatrix alpha1_from_commutator(const BHParams& p) {
  const cplx i(0.0, 1.0);
  const cplx chi = i * p.delta - p.kappa;
  const OperatorMatrix source = commutator(build_bh_hamiltonian(p), build_alpha0_bh(p)) * (-i);
  return source * (-1.0 / chi);
}

OperatorMatrix build_alpha1_bh(const BHParams& p) {
  if (!p.default_weights()) return alpha1_from_commutator(p);
  const LatticeFockBasis basis = basis_of(p);
  const SiteOperators ops = site_operators(basis);
  const cplx dk = detuning(p);
  const cplx prefactor = 2.0 * p.J * p.eta / (dk * dk);
  OperatorMatrix out = OperatorMatrix::zero(basis.space());
  for (std::size_t k = 0; k < ops.hop.size(); ++k) {
    const int j = static_cast<int>(k) + 1;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    out += (ops.hop[k] - ops.hop[k].adjoint()) * cplx(sign);
  }
  return out * prefactor;
}

double bh_gamma(const BHParams& p) {
  return p.kappa * p.eta * p.eta / (p.delta * p.delta + p.kappa * p.kappa);
}

LindbladModel build_adiabatic_bh_model(const BHParams& p) {
  const OperatorMatrix theta = build_theta_bh(p);
  const double shift = p.delta * p.eta * p.eta / (p.delta * p.delta + p.kappa * p.kappa);
  OperatorMatrix h = build_bh_hamiltonian(p) + (theta * theta) * cplx(shift);
  return LindbladModel(std::move(h), {Dissipator{bh_gamma(p), theta, "cavity-mediated dephasing"}});
}

LindbladModel build_diabatic_bh_model(const BHParams& p) {
  const OperatorMatrix alpha = build_alpha0_bh(p) + build_alpha1_bh(p);
  const OperatorMatrix g = build_theta_bh(p) * cplx(p.eta);
  OperatorMatrix coupling = alpha.adjoint() * g;
  coupling += coupling.adjoint();
  OperatorMatrix h = build_bh_hamiltonian(p) + coupling * cplx(0.5);
  // Remove rounding-level anti-Hermitian residue.
  h = OperatorMatrix(h.space(), 0.5 * (h.matrix() + h.matrix().adjoint()));
  return LindbladModel(std::move(h), {Dissipator{p.kappa, alpha, "cavity loss"}});
}

EpsilonReport epsilon_report(const BHParams& p, double E_kin,
                             std::optional<double> recoil_scale) {
  const double mod = std::abs(detuning(p));
  EpsilonReport r;
  r.eps2 = std::abs(p.eta) * std::sqrt(double(p.N)) / mod;
  r.eps_fig3 = double(p.N) * p.eta * p.eta / (p.delta * p.delta + p.kappa * p.kappa);
  r.gamma_heat = bh_gamma(p);
  if (recoil_scale) {
    r.eps1 = std::sqrt(4.0 * E_kin * *recoil_scale) / mod;
    r.adiabatic_lhs = *r.eps1 * r.eps2;
  }
  r.elimination_ratio =
      std::max({std::abs(p.J), std::abs(p.u), std::abs(p.eta) * std::sqrt(double(p.N))}) / mod;
  return r;
}

OperatorMatrix DissipatorSum::apply(const OperatorMatrix& mu) const {
  OperatorMatrix out = OperatorMatrix::zero(mu.space());
  for (const auto& t : terms) out += (t.left * mu * t.right) * cplx(t.weight);
  return out;
}

OperatorMatrix CqedTerms::assembled_hamiltonian() const {
  OperatorMatrix out = OperatorMatrix::zero(hamiltonian.front().op.space());
  for (const auto& t : hamiltonian) out += t.op;
  return out;
}

OperatorMatrix CqedTerms::apply_dissipator(const OperatorMatrix& mu) const {
  OperatorMatrix out = OperatorMatrix::zero(mu.space());
  for (const auto& d : dissipator) out += d.apply(mu);
  return out;
}

CqedTerms expand_cqed_terms(const BHParams& p) {
  const LatticeFockBasis basis = basis_of(p);
  const SiteOperators ops = site_operators(basis);
  const auto n = ops.density;
  const auto b = bonds(ops);
  const auto z = p.site_weights();
  const auto y = p.bond_weights();
  const double d2k2 = p.delta * p.delta + p.kappa * p.kappa;
  const double shift = p.delta * p.eta * p.eta / d2k2;
  const double gamma = bh_gamma(p);
  const OperatorMatrix id = OperatorMatrix::identity(basis.space());
  const OperatorMatrix zero = OperatorMatrix::zero(basis.space());

  auto pair_sum = [&](const std::vector<OperatorMatrix>& a, const std::vector<double>& wa,
                      const std::vector<OperatorMatrix>& c, const std::vector<double>& wc) {
    OperatorMatrix s = zero;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (wa[i] * wc[j] != 0.0) s += (a[i] * c[j]) * cplx(shift * wa[i] * wc[j]);
      }
    }
    return s;
  };

  CqedTerms t;
  t.hamiltonian.push_back({"density-density", pair_sum(n, z, n, z)});
  t.hamiltonian.push_back({"density-bond", pair_sum(n, z, b, y)});
  t.hamiltonian.push_back({"bond-density", pair_sum(b, y, n, z)});
  t.hamiltonian.push_back({"bond-bond", pair_sum(b, y, b, y)});

  // sum_ij w_i w_j (2 A_i mu C_j - {C_j A_i, mu}), optionally with its adjoint
  // (A <-> C) added.
  auto double_sum = [&](std::string label, const std::vector<OperatorMatrix>& a,
                        const std::vector<double>& wa, const std::vector<OperatorMatrix>& c,
                        const std::vector<double>& wc, bool add_adjoint) {
    DissipatorSum d{std::move(label), {}};
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        const double w = gamma * wa[i] * wc[j];
        if (w == 0.0) continue;
        const OperatorMatrix ca = c[j] * a[i];
        d.terms.push_back({2.0 * w, a[i], c[j]});
        d.terms.push_back({-w, ca, id});
        d.terms.push_back({-w, id, ca});
        if (add_adjoint) {
          const OperatorMatrix ac = a[i] * c[j];
          d.terms.push_back({2.0 * w, c[j], a[i]});
          d.terms.push_back({-w, ac, id});
          d.terms.push_back({-w, id, ac});
        }
      }
    }
    return d;
  };
  t.dissipator.push_back(double_sum("density-density", n, z, n, z, false));
  t.dissipator.push_back(double_sum("bond-bond", b, y, b, y, false));
  t.dissipator.push_back(double_sum("bond-density", b, y, n, z, true));
  return t;
}

GroundState ground_state(const OperatorMatrix& h) {
  const Eigen::MatrixXcd herm = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical, "Hermitian eigensolver did not converge");
  }
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

}  // namespace cqed
