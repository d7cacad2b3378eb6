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

#include <doctest.h>

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cqed/bose_hubbard.hpp"
#include "cqed/error.hpp"
#include "cqed/observables.hpp"

using namespace cqed;

namespace {

BHParams fig3(double eta) {
  BHParams p;
  p.eta = eta;
  return p;
}

OperatorMatrix total_number(const BHParams& p) {
  const auto ops = site_operators(LatticeFockBasis(p.L, p.N));
  OperatorMatrix n = OperatorMatrix::zero(ops.density.front().space());
  for (const auto& d : ops.density) n += d;
  return n;
}

}  // namespace

TEST_CASE("order parameter on Fock states") {
  const BHParams p = fig3(100);
  const LatticeFockBasis basis(p.L, p.N);
  const OperatorMatrix theta = build_theta_bh(p);
  const auto k = Eigen::Index(*basis.index_of({1, 0, 1, 0}));
  CHECK(theta(k, k).real() == doctest::Approx(-2.0));
  Eigen::MatrixXcd off = theta.matrix();
  off.diagonal().setZero();
  CHECK(off.norm() == 0.0);

  // Fully mixed state: sum over the ten Fock states of (sum_j (-1)^j n_j)^2,
  // j = 1..4, in integer arithmetic.
  long total = 0;
  for (const auto& occ : basis.states()) {
    long s = 0;
    for (int j = 0; j < p.L; ++j) s += ((j + 1) % 2 == 0 ? 1 : -1) * occ[j];
    total += s * s;
  }
  CHECK(total == 24);
  const auto mixed = DensityState::maximally_mixed(basis.space());
  const double v = expectation(theta * theta, mixed.matrix()).real() / double(p.N * p.N);
  CHECK(std::abs(v - 0.6) < 1e-15);
}

TEST_CASE("epsilon mapping and heating rate") {
  const auto a = epsilon_report(fig3(100), 0.0);
  const auto b = epsilon_report(fig3(300), 0.0);
  CHECK(std::abs(a.eps_fig3 - 0.04) < 1e-12);
  CHECK(std::abs(b.eps_fig3 - 0.36) < 1e-12);
  CHECK(a.eps2 == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(a.gamma_heat == doctest::Approx(500.0 * 1e4 / 500000.0).epsilon(1e-12));
  CHECK(bh_gamma(fig3(100)) == a.gamma_heat);
  CHECK_FALSE(a.eps1.has_value());
  const auto c = epsilon_report(fig3(0), 0.0);
  CHECK(c.eps2 == 0.0);
  CHECK(c.eps_fig3 == 0.0);
  CHECK(c.gamma_heat == 0.0);
  const auto d = epsilon_report(fig3(100), 3.0, 0.5);
  REQUIRE(d.eps1.has_value());
  CHECK(*d.adiabatic_lhs == doctest::Approx(*d.eps1 * d.eps2));
}

TEST_CASE("diabatic correction: closed form against the commutator") {
  for (double eta : {100.0, 300.0}) {
    const BHParams p = fig3(eta);
    const auto closed = build_alpha1_bh(p);
    const auto solved = alpha1_from_commutator(p);
    CHECK((closed - solved).norm() <= 1e-12 * std::max(1.0, solved.norm()));
    CHECK(solved.norm() > 0.0);
  }
  BHParams odd = fig3(100);
  odd.Z = {0.3, -1.0, 0.7, 0.1};
  odd.Y = {0.2, 0.0, -0.4};
  CHECK((build_alpha1_bh(odd) - alpha1_from_commutator(odd)).norm() < 1e-14);
  CHECK(build_alpha0_bh(odd).norm() > 0.0);
}

TEST_CASE("adiabatic model and its term expansion") {
  for (bool plain : {true, false}) {
    BHParams p = fig3(100);
    if (!plain) {
      p.Z = {0.3, -1.0, 0.7, 0.1};
      p.Y = {0.2, -0.5, -0.4};
    }
    const OperatorMatrix theta = build_theta_bh(p);
    const double shift = p.delta * p.eta * p.eta / (p.delta * p.delta + p.kappa * p.kappa);
    const auto terms = expand_cqed_terms(p);
    CHECK((terms.assembled_hamiltonian() - theta * theta * cplx(shift)).norm() < 1e-10);

    const auto model = build_adiabatic_bh_model(p);
    CHECK((model.hamiltonian() - build_bh_hamiltonian(p) - theta * theta * cplx(shift)).norm() < 1e-10);

    // Gamma D[Theta] mu, factor-2 convention.
    const auto mu = DensityState::maximally_mixed(theta.space()).matrix() +
                    build_bh_hamiltonian(p) * cplx(0.01);
    const double g = bh_gamma(p);
    const OperatorMatrix td = theta.adjoint() * theta;
    const OperatorMatrix want =
        (cplx(2.0) * theta * mu * theta.adjoint() - td * mu - mu * td) * cplx(g);
    CHECK((terms.apply_dissipator(mu) - want).norm() < 1e-10);
  }
}

TEST_CASE("full model conserves the atom number") {
  BHParams p = fig3(100);
  p.photon_cutoff = 4;
  const auto model = build_full_bh_model(p);
  CHECK(model.hamiltonian().is_hermitian(1e-12));
  const auto hs = build_bh_hamiltonian(p);
  const auto gs = ground_state(hs);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(4);
  vac(0) = 1.0;
  const auto rho0 = tensor(DensityState::pure(hs.space(), gs.vector),
                           DensityState::pure(SpaceDescriptor("photon", 4), vac));
  const auto number = tensor(total_number(p), OperatorMatrix::identity(SpaceDescriptor("photon", 4)));
  std::vector<double> t{0.0, 0.05, 0.1, 0.2};
  const auto tr = evolve(model, rho0, t);
  for (const auto& r : tr.states) CHECK(std::abs(expectation(number, r).real() - 2.0) < 1e-8);
}

TEST_CASE("zero pump keeps the atoms pure") {
  BHParams p = fig3(0);
  p.photon_cutoff = 3;
  const auto model = build_full_bh_model(p);
  const auto hs = build_bh_hamiltonian(p);
  const LatticeFockBasis basis(p.L, p.N);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index(basis.dim()));
  psi(Eigen::Index(*basis.index_of({1, 0, 1, 0}))) = 1.0;
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(3);
  vac(0) = 1.0;
  const auto rho0 = tensor(DensityState::pure(hs.space(), psi),
                           DensityState::pure(SpaceDescriptor("photon", 3), vac));
  const std::vector<double> t{0.0, 1.0, 2.0};
  const auto tr = evolve(model, rho0, t);
  const auto atoms = reduce_to(tr.states.back(), "lattice");
  CHECK(std::abs((atoms * atoms).trace().real() - 1.0) < 1e-8);
}

TEST_CASE("Fock-diagonal states are stationary without tunnelling") {
  BHParams p = fig3(100);
  p.J = 0.0;
  const LatticeFockBasis basis(p.L, p.N);
  Eigen::VectorXd pops = Eigen::VectorXd::LinSpaced(Eigen::Index(basis.dim()), 1.0, 2.0);
  pops /= pops.sum();
  const auto mu = DensityState::diagonal(basis.space(), pops);
  CHECK(rhs(build_adiabatic_bh_model(p), mu.matrix()).norm() < 1e-13);
  CHECK(rhs(build_diabatic_bh_model(p), mu.matrix()).norm() < 1e-13);
}

TEST_CASE("ground state against a dense solver") {
  const auto hs = build_bh_hamiltonian(fig3(100));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hs.matrix());
  const auto gs = ground_state(hs);
  CHECK(gs.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-12));
  CHECK((hs.matrix() * gs.vector - gs.energy * gs.vector).norm() < 1e-10);
}

TEST_CASE("parameter validation") {
  BHParams p;
  p.Z = {1.0, 2.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  BHParams q;
  q.kappa = -1.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  BHParams r;
  r.L = 1;
  CHECK_THROWS_AS(r.validate(), ConfigError);
}
