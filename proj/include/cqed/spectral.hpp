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

// Dense eigendecomposition of the Liouvillian superoperator. Modes are kept
// as columns of d^2 x n matrices in column-stacking order; right_mode and
// left_mode reshape them on demand.

#ifndef CQED_SPECTRAL_HPP
#define CQED_SPECTRAL_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "cqed/hilbert.hpp"
#include "cqed/lindblad.hpp"

namespace cqed {

struct SpectralOptions {
  /// Eigenvalues closer than this times the Liouvillian's infinity norm are
  /// treated as one cluster when re-pairing left and right modes.
  double degeneracy_rel = 1e-7;
  /// Cluster Gram matrices with a larger condition number flag the
  /// decomposition as defective.
  double gram_condition_cap = 1e8;
  std::size_t max_dim = kDefaultSuperoperatorCap;
};

class SpectralDecomposition {
 public:
  SpectralDecomposition(SpaceDescriptor space, Eigen::VectorXcd eigenvalues,
                        Eigen::MatrixXcd right, Eigen::MatrixXcd left, bool defective);

  const SpaceDescriptor& space() const { return space_; }
  std::size_t size() const { return static_cast<std::size_t>(eigenvalues_.size()); }
  const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
  /// Column k is vec(rho_k); left columns satisfy left^H right = I.
  const Eigen::MatrixXcd& right() const { return right_; }
  const Eigen::MatrixXcd& left() const { return left_; }
  bool defective() const { return defective_; }

  OperatorMatrix right_mode(std::size_t k) const;
  OperatorMatrix left_mode(std::size_t k) const;

  /// c_k = Tr(left_k^dag rho0).
  Eigen::VectorXcd coefficients(const OperatorMatrix& rho0) const;
  /// sum_k c_k exp(lambda_k t) rho_k.
  OperatorMatrix propagate(const OperatorMatrix& rho0, double t) const;

 private:
  SpaceDescriptor space_;
  Eigen::VectorXcd eigenvalues_;
  Eigen::MatrixXcd right_;
  Eigen::MatrixXcd left_;
  bool defective_;
};

SpectralDecomposition spectral_decompose(const LindbladModel& model,
                                         const SpectralOptions& options = {});

/// Eigenvalues only (no eigenvectors), much cheaper at the size cap.
Eigen::VectorXcd liouvillian_eigenvalues(const LindbladModel& model,
                                         std::size_t max_dim = kDefaultSuperoperatorCap);

/// Eigenvalues of a general complex matrix; the input is consumed.
Eigen::VectorXcd eigenvalues_of(Eigen::MatrixXcd matrix);

/// The `count` eigenvalues with the largest real part, in descending order of
/// real part (ties broken by imaginary part).
std::vector<cplx> slowest_eigenvalues(const Eigen::VectorXcd& values, std::size_t count);

/// max_{j,k} |Tr(left_j^dag right_k) - delta_jk|. Cost O(n^3).
double biorthonormality_error(const SpectralDecomposition& decomposition);

/// Stationary state from the null space of L. A degenerate null space yields
/// the projection of the maximally mixed state onto it.
DensityState steady_state(const LindbladModel& model,
                          std::size_t max_dim = kDefaultSuperoperatorCap);

}  // namespace cqed

#endif  // CQED_SPECTRAL_HPP
