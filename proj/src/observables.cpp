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

#include "cqed/observables.hpp"

#include <cmath>

#include "cqed/error.hpp"

namespace cqed {

void ObservableSeries::validate() const {
  if (times.size() != values.size()) {
    throw Error(ErrorKind::kShape, "series '" + name + "': times and values differ in length");
  }
  if (units.empty()) throw Error(ErrorKind::kShape, "series '" + name + "' has no units");
}

cplx expectation(const OperatorMatrix& op, const OperatorMatrix& rho) {
  if (!(op.space() == rho.space())) {
    throw Error(ErrorKind::kShape, "operator and state act on different spaces");
  }
  // Tr(AB) = sum_ij A_ij B_ji
  const cplx value = op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
  const double scale = std::max(1.0, op.matrix().cwiseAbs().maxCoeff());
  if (op.hermiticity_error() <= 1e-12 * scale && std::abs(value.imag()) > 1e-8 * scale) {
    throw Error(ErrorKind::kNumerical, "Hermitian observable has a complex expectation value");
  }
  return value;
}

cplx expectation(const OperatorMatrix& op, const DensityState& rho) {
  return expectation(op, rho.matrix());
}

OperatorMatrix partial_trace(const OperatorMatrix& rho, std::string_view label) {
  const auto& factors = rho.space().factors();
  const auto pos = rho.space().find(label);
  if (!pos) {
    throw Error(ErrorKind::kShape, "space has no factor labelled '" + std::string(label) + "'");
  }
  if (factors.size() < 2) {
    throw Error(ErrorKind::kShape, "cannot trace out the only factor");
  }
  Eigen::Index before = 1, after = 1;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (k < *pos) before *= static_cast<Eigen::Index>(factors[k].dim);
    if (k > *pos) after *= static_cast<Eigen::Index>(factors[k].dim);
  }
  const auto mid = static_cast<Eigen::Index>(factors[*pos].dim);
  const Eigen::MatrixXcd& m = rho.matrix();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(before * after, before * after);
  for (Eigen::Index a = 0; a < before; ++a) {
    for (Eigen::Index a2 = 0; a2 < before; ++a2) {
      for (Eigen::Index b = 0; b < mid; ++b) {
        out.block(a * after, a2 * after, after, after) +=
            m.block((a * mid + b) * after, (a2 * mid + b) * after, after, after);
      }
    }
  }
  std::vector<SpaceDescriptor::Factor> rest;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    if (k != *pos) rest.push_back(factors[k]);
  }
  return OperatorMatrix(SpaceDescriptor(std::move(rest)), std::move(out));
}

OperatorMatrix reduce_to(const OperatorMatrix& rho, std::string_view label) {
  if (!rho.space().find(label)) {
    throw Error(ErrorKind::kShape, "space has no factor labelled '" + std::string(label) + "'");
  }
  OperatorMatrix out = rho;
  while (out.space().factors().size() > 1) {
    for (const auto& f : out.space().factors()) {
      if (f.label != label) {
        out = partial_trace(out, f.label);
        break;
      }
    }
  }
  return out;
}

Eigen::VectorXd momentum_distribution(const OperatorMatrix& rho) {
  return reduce_to(rho, kMomentumLabel).matrix().diagonal().real();
}

namespace {

void check_ladder(const Eigen::VectorXd& populations, const MomentumLadder& ladder) {
  if (static_cast<std::size_t>(populations.size()) != ladder.dim()) {
    throw Error(ErrorKind::kShape, "population vector does not match the ladder");
  }
}

Eigen::ArrayXd momentum_numbers(const MomentumLadder& ladder) {
  return Eigen::ArrayXd::LinSpaced(static_cast<Eigen::Index>(ladder.dim()), -ladder.n_max(),
                                   ladder.n_max());
}

}  // namespace

double kinetic_energy(const Eigen::VectorXd& populations, const MomentumLadder& ladder) {
  check_ladder(populations, ladder);
  const Eigen::ArrayXd n = momentum_numbers(ladder);
  return ladder.recoil() * (n.square() * populations.array()).sum();
}

double kinetic_energy(const OperatorMatrix& rho, const MomentumLadder& ladder) {
  return kinetic_energy(momentum_distribution(rho), ladder);
}

double kurtosis(const Eigen::VectorXd& populations, const MomentumLadder& ladder) {
  check_ladder(populations, ladder);
  const Eigen::ArrayXd n = momentum_numbers(ladder);
  const Eigen::ArrayXd w = populations.array() / populations.sum();
  const double mean = (n * w).sum();
  const Eigen::ArrayXd d2 = (n - mean).square();
  const double var = (d2 * w).sum();
  if (!(var > 1e-300)) {
    throw Error(ErrorKind::kUndefinedKurtosis, "momentum distribution has zero variance");
  }
  return (d2.square() * w).sum() / (var * var);
}

double kurtosis(const OperatorMatrix& rho, const MomentumLadder& ladder) {
  return kurtosis(momentum_distribution(rho), ladder);
}

double lab_frame_photon_number(const OperatorMatrix& rho) {
  const OperatorMatrix photons = reduce_to(rho, kPhotonLabel);
  const auto dim = static_cast<Eigen::Index>(photons.dim());
  const Eigen::ArrayXd n = Eigen::ArrayXd::LinSpaced(dim, 0.0, double(dim - 1));
  return (n * photons.matrix().diagonal().real().array()).sum();
}

double lab_frame_photon_number(const OperatorMatrix& rho, const OperatorMatrix& alpha) {
  const OperatorMatrix ada = alpha.adjoint() * alpha;
  return expectation(ada, rho).real();
}

ObservableSeries gaussian_ansatz_trajectory(const GaussianAnsatzCoefficients& coeffs,
                                            double E0, std::span<const double> t_grid) {
  if (!(coeffs.gamma_c > 0.0)) {
    throw Error(ErrorKind::kNoCooling, "Gaussian ansatz needs a positive cooling rate");
  }
  ObservableSeries s;
  s.name = "E_kin";
  s.units = "hbar*omega_R";
  s.times.assign(t_grid.begin(), t_grid.end());
  s.values.reserve(t_grid.size());
  for (double t : t_grid) {
    s.values.emplace_back(coeffs.E_ss + (E0 - coeffs.E_ss) * std::exp(-coeffs.gamma_c * t));
  }
  return s;
}

}  // namespace cqed
