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
#include <random>

#include "cqed/cooling.hpp"
#include "cqed/error.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/observables.hpp"

using namespace cqed;

namespace {

Eigen::MatrixXcd random_matrix(Eigen::Index n, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

// A generic model: dense Hermitian H and two dense jumps on two factors, so
// no splitting shortcut applies.
LindbladModel random_model(std::mt19937& rng) {
  const SpaceDescriptor space(std::vector<SpaceDescriptor::Factor>{{"a", 2}, {"b", 3}});
  const Eigen::MatrixXcd h = random_matrix(6, rng);
  const OperatorMatrix H(space, 0.5 * (h + h.adjoint()));
  return LindbladModel(H, {{0.3, OperatorMatrix(space, random_matrix(6, rng)), "j1"},
                           {0.7, OperatorMatrix(space, random_matrix(6, rng)), "j2"}});
}

DensityState random_state(const SpaceDescriptor& space, std::mt19937& rng) {
  const auto d = static_cast<Eigen::Index>(space.total_dim());
  const Eigen::MatrixXcd x = random_matrix(d, rng);
  Eigen::MatrixXcd rho = x * x.adjoint();
  rho /= rho.trace();
  return DensityState(OperatorMatrix(space, rho));
}

LindbladModel damped_cavity(std::size_t levels, double delta, double kappa) {
  const auto a = fock_annihilation(levels);
  return LindbladModel(fock_number(levels) * cplx(-delta), {{kappa, a, "loss"}});
}

}  // namespace

TEST_CASE("column-stacking vectorisation") {
  std::mt19937 rng(1);
  const auto a = random_matrix(3, rng), x = random_matrix(3, rng), b = random_matrix(3, rng);
  const Eigen::VectorXcd lhs = vectorize(a * x * b);
  const Eigen::VectorXcd rhs_ = kron(b.transpose(), a) * vectorize(x);
  CHECK((lhs - rhs_).norm() < 1e-12);
  CHECK((unvectorize(vectorize(x), 3) - x).norm() == 0.0);
  CHECK_THROWS_AS(unvectorize(vectorize(x), 4), Error);
}

TEST_CASE("superoperator, operator form and generator agree") {
  std::mt19937 rng(2);
  const LindbladModel model = random_model(rng);
  const auto rho = random_state(model.space(), rng);

  // Independent superoperator with the factor-2 dissipator.
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(6, 6);
  const Eigen::MatrixXcd& H = model.hamiltonian().matrix();
  Eigen::MatrixXcd L = cplx(0, -1) * (kron(I, H) - kron(H.transpose(), I));
  for (const auto& d : model.dissipators()) {
    const Eigen::MatrixXcd& J = d.jump.matrix();
    const Eigen::MatrixXcd jdj = J.adjoint() * J;
    L += d.rate * (2.0 * kron(J.conjugate(), J) - kron(I, jdj) - kron(jdj.transpose(), I));
  }
  CHECK((liouvillian_matrix(model) - L).norm() < 1e-12 * L.norm());

  const Eigen::MatrixXcd expected = unvectorize(L * vectorize(rho.matrix().matrix()), 6);
  CHECK((rhs(model, rho.matrix()).matrix() - expected).norm() < 1e-12);

  const LindbladGenerator gen(model);
  Eigen::MatrixXcd out;
  gen.apply(rho.matrix().matrix(), out);
  CHECK((out - expected).norm() < 1e-12);
  gen.apply_hermitian(rho.matrix().matrix(), out);
  CHECK((out - expected).norm() < 1e-12);

  // apply() also handles non-Hermitian input.
  const Eigen::MatrixXcd x = random_matrix(6, rng);
  gen.apply(x, out);
  CHECK((out - unvectorize(L * vectorize(x), 6)).norm() < 1e-11);

  const Eigen::MatrixXcd diag = gen.diagonal_part();
  for (Eigen::Index j = 0; j < 6; ++j)
    for (Eigen::Index i = 0; i < 6; ++i) {
      const Eigen::Index k = i + 6 * j;
      // The basis-diagonal part drops the 2 J rho J^dag contribution.
      cplx jump_part = 0.0;
      for (const auto& d : model.dissipators())
        jump_part += 2.0 * d.rate * std::conj(d.jump(j, j)) * d.jump(i, i);
      CHECK(std::abs(diag(i, j) + jump_part - L(k, k)) < 1e-12 * L.norm());
    }
}

TEST_CASE("pure cavity decay follows exp(-2 kappa t)") {
  const double kappa = 0.8;
  const LindbladModel model = damped_cavity(5, -3.0, kappa);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(5);
  psi(3) = 1.0;
  const auto rho0 = DensityState::pure(model.space(), psi);
  std::vector<double> t;
  for (int k = 0; k <= 40; ++k) t.push_back(0.1 * k);
  const NamedObservable n{"n", [](const OperatorMatrix& r) { return cplx(lab_frame_photon_number(r)); }};
  for (Integrator method : {Integrator::kDormandPrince45, Integrator::kExponentialRk4}) {
    EvolveOptions o;
    o.method = method;
    const auto tr = evolve(model, rho0, t, o, std::span(&n, 1));
    double err = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
      err = std::max(err, std::abs(tr.observable("n")[k].real() - 3.0 * std::exp(-2.0 * kappa * t[k])));
    CHECK(err < 1e-7);
    CHECK(tr.max_trace_drift < 1e-8);
  }
}

TEST_CASE("invariants along a generic evolution") {
  std::mt19937 rng(3);
  const LindbladModel model = random_model(rng);
  const auto rho0 = random_state(model.space(), rng);
  std::vector<double> t;
  for (int k = 0; k <= 20; ++k) t.push_back(0.25 * k);
  std::vector<Trajectory> runs;
  for (Integrator method : {Integrator::kDormandPrince45, Integrator::kExponentialRk4}) {
    EvolveOptions o;
    o.method = method;
    o.rel_tol = 1e-10;
    o.abs_tol = 1e-12;
    runs.push_back(evolve(model, rho0, t, o));
    for (const auto& r : runs.back().states) {
      CHECK(std::abs(r.trace() - 1.0) < 1e-8);
      CHECK(r.hermiticity_error() < 1e-12);
      CHECK(min_eigenvalue(r) > -1e-8);
    }
  }
  for (std::size_t k = 0; k < t.size(); ++k)
    CHECK((runs[0].states[k] - runs[1].states[k]).norm() < 1e-7);
}

TEST_CASE("block-separable split matches the reference integrator") {
  CoolingParams p;
  p.ladder = MomentumLadder(6);
  p.photon_cutoff = 4;
  p.dispersive_shift = 0.7;
  const LindbladModel model = build_full_cooling_model(p);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(4);
  vac(0) = 1.0;
  const auto rho0 = tensor(thermal_state(p.ladder, 5.0),
                           DensityState::pure(SpaceDescriptor("photon", 4), vac));
  std::vector<double> t;
  for (int k = 0; k <= 10; ++k) t.push_back(2.0 * k);
  EvolveOptions dp;
  dp.rel_tol = 1e-11;
  dp.abs_tol = 1e-13;
  EvolveOptions etd = dp;
  etd.method = Integrator::kExponentialRk4;
  etd.rel_tol = 1e-9;
  const auto a = evolve(model, rho0, t, dp);
  const auto b = evolve(model, rho0, t, etd);
  for (std::size_t k = 0; k < t.size(); ++k) CHECK((a.states[k] - b.states[k]).norm() < 1e-7);
  CHECK(b.max_trace_drift < 1e-12);
}

TEST_CASE("construction and input errors") {
  const SpaceDescriptor s("x", 2);
  Eigen::MatrixXcd h(2, 2);
  h << 0, 1, 0, 0;
  CHECK_THROWS_AS(LindbladModel(OperatorMatrix(s, h)), Error);
  CHECK_THROWS_AS(LindbladModel(OperatorMatrix::zero(s), {{-1.0, OperatorMatrix::identity(s), "bad"}}),
                  Error);
  CHECK_THROWS_AS(DensityState(OperatorMatrix::identity(s)), Error);  // trace 2

  const LindbladModel model = damped_cavity(3, -1.0, 1.0);
  const auto rho0 = DensityState::maximally_mixed(model.space());
  const std::vector<double> bad{0.0, 1.0, 1.0};
  CHECK_THROWS_AS(evolve(model, rho0, bad), Error);
  const std::vector<double> late{0.5, 1.0};
  CHECK_THROWS_AS(evolve(model, rho0, late), Error);

  EvolveOptions tiny;
  tiny.rel_tol = 1e-2;
  tiny.abs_tol = 1e-2;
  tiny.max_trace_drift = 1e-300;
  const std::vector<double> t{0.0, 5.0};
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(3);
  psi(2) = 1.0;
  try {
    evolve(model, DensityState::pure(model.space(), psi), t, tiny);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIntegrationAccuracy);
  }

  CHECK_THROWS_AS(liouvillian_matrix(damped_cavity(90, -1.0, 1.0)), Error);
}
