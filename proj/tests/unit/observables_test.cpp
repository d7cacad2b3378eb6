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

#include "cqed/error.hpp"
#include "cqed/observables.hpp"

using namespace cqed;

namespace {

Eigen::MatrixXcd random_density(Eigen::Index d, std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd x(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = cplx(g(rng), g(rng));
  Eigen::MatrixXcd rho = x * x.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("partial traces against explicit index sums") {
  std::mt19937 rng(4);
  const MomentumLadder ladder(2);
  const SpaceDescriptor space = SpaceDescriptor::product(ladder.space(), SpaceDescriptor("photon", 3));
  const OperatorMatrix rho(space, random_density(15, rng));
  Eigen::MatrixXcd atoms = Eigen::MatrixXcd::Zero(5, 5), photons = Eigen::MatrixXcd::Zero(3, 3);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b)
      for (int m = 0; m < 3; ++m) {
        atoms(a, b) += rho(a * 3 + m, b * 3 + m);
        for (int n = 0; n < 3; ++n)
          if (a == b) photons(m, n) += rho(a * 3 + m, a * 3 + n);
      }
  CHECK((partial_trace(rho, "photon").matrix() - atoms).norm() < 1e-14);
  CHECK((reduce_to(rho, "momentum").matrix() - atoms).norm() < 1e-14);
  CHECK((partial_trace(rho, "momentum").matrix() - photons).norm() < 1e-14);
  CHECK((momentum_distribution(rho) - atoms.diagonal().real()).norm() < 1e-14);
  CHECK(kinetic_energy(rho, ladder) ==
        doctest::Approx(kinetic_energy(Eigen::VectorXd(atoms.diagonal().real()), ladder)));
  CHECK_THROWS_AS(partial_trace(rho, "lattice"), Error);

  const OperatorMatrix a = fock_annihilation(3);
  const auto n = tensor(OperatorMatrix::identity(ladder.space()), a.adjoint() * a);
  CHECK(lab_frame_photon_number(rho) == doctest::Approx(expectation(n, rho).real()));
}

TEST_CASE("expectation rejects imaginary parts of Hermitian observables") {
  const SpaceDescriptor s("x", 2);
  Eigen::MatrixXcd m(2, 2);
  m << 0.5, cplx(0, 0.3), cplx(0, 0.3), 0.5;  // not Hermitian
  Eigen::MatrixXcd sx(2, 2);
  sx << 0, 1, 1, 0;
  try {
    expectation(OperatorMatrix(s, sx), OperatorMatrix(s, m));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumerical);
  }
  Eigen::MatrixXcd up(2, 2);
  up << 0, 1, 0, 0;  // non-Hermitian operators may have complex values
  CHECK(std::abs(expectation(OperatorMatrix(s, up), OperatorMatrix(s, m)) - cplx(0, 0.3)) < 1e-15);
}

TEST_CASE("kurtosis of simple distributions") {
  const MomentumLadder ladder(3);
  Eigen::VectorXd two = Eigen::VectorXd::Zero(7);
  two(Eigen::Index(ladder.index(-2))) = 0.5;
  two(Eigen::Index(ladder.index(2))) = 0.5;
  CHECK(kurtosis(two, ladder) == doctest::Approx(1.0));
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(7);
  for (int n : {-1, 0, 1}) flat(Eigen::Index(ladder.index(n))) = 1.0 / 3.0;
  CHECK(kurtosis(flat, ladder) == doctest::Approx(1.5));
  CHECK(kinetic_energy(flat, ladder) == doctest::Approx(2.0 / 3.0));
  Eigen::VectorXd point = Eigen::VectorXd::Zero(7);
  point(3) = 1.0;
  try {
    kurtosis(point, ladder);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUndefinedKurtosis);
  }
}

TEST_CASE("Gaussian-ansatz trajectory") {
  GaussianAnsatzCoefficients c{0.01, 0.05, 5.0};
  const std::vector<double> t{0.0, 100.0, 1e5};
  const auto s = gaussian_ansatz_trajectory(c, 10.0, t);
  CHECK(s.name == "E_kin");
  CHECK(s.values[0].real() == doctest::Approx(10.0));
  CHECK(s.values[1].real() == doctest::Approx(5.0 + 5.0 * std::exp(-1.0)));
  CHECK(s.values[2].real() == doctest::Approx(5.0));
  c.gamma_c = 0.0;
  CHECK_THROWS_AS(gaussian_ansatz_trajectory(c, 10.0, t), Error);
}

TEST_CASE("series validation") {
  ObservableSeries s;
  s.name = "x";
  s.times = {0.0, 1.0};
  s.values = {1.0};
  s.units = "1";
  CHECK_THROWS_AS(s.validate(), Error);
  s.values.push_back(2.0);
  CHECK_NOTHROW(s.validate());
  s.units.clear();
  CHECK_THROWS_AS(s.validate(), Error);
}
